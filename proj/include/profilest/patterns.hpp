#pragma once

// Sequences, patterns and profiles.
//
// A pattern replaces every token by the order of its first appearance, so
// "abracadabra" becomes 1 2 3 1 4 1 5 1 2 3 1. A profile forgets the order
// entirely and keeps, for every multiplicity mu, the number of distinct
// symbols (the prevalence) that appear exactly mu times.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace profilest {

struct TokenSequence {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  // Splits on ASCII whitespace.
  static TokenSequence from_whitespace(std::string_view text);
  // One token per line; blank lines are skipped.
  static TokenSequence from_lines(std::string_view text);
  // Every byte is a token ("abracadabra" -> 11 tokens).
  static TokenSequence from_chars(std::string_view text);
};

class Pattern {
 public:
  Pattern() = default;
  // Throws InvalidInput unless the index property holds.
  explicit Pattern(std::vector<int> indices);

  // Accepts "1 1 2 3" or "1123" (single digits, only when m <= 9).
  static Pattern parse(std::string_view text);

  const std::vector<int>& indices() const { return indices_; }
  int n() const { return static_cast<int>(indices_.size()); }
  int m() const { return m_; }
  bool empty() const { return indices_.empty(); }

  // Space separated, e.g. "1 2 3 1".
  std::string to_string() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;

 private:
  std::vector<int> indices_;
  int m_ = 0;
};

class Profile {
 public:
  Profile() = default;
  // multiplicity -> prevalence; zero prevalences are dropped, negative or
  // zero multiplicities are rejected.
  explicit Profile(const std::map<int, int>& prevalences);

  // Builds a profile from a list of symbol multiplicities (any order).
  static Profile from_multiplicities(const std::vector<int>& multiplicities);

  // "1^2 2^2 5^1", factors in any order, "^1" optional, repeated
  // multiplicities accumulate.
  static Profile parse(std::string_view text);

  const std::map<int, int>& prevalences() const { return prevalences_; }

  int n() const { return n_; }
  int m() const { return m_; }
  int mu_min() const;
  int mu_max() const;
  int prevalence(int mu) const;
  int singletons() const { return prevalence(1); }
  bool empty() const { return prevalences_.empty(); }

  // Symbol multiplicities, nonincreasing.
  std::vector<int> multiplicities() const;

  // Ascending factors, exponent always printed: "1^2 2^2 5^1".
  std::string to_string() const;

  friend bool operator==(const Profile&, const Profile&) = default;
  friend auto operator<=>(const Profile& a, const Profile& b) {
    return a.prevalences_ <=> b.prevalences_;
  }

 private:
  std::map<int, int> prevalences_;
  int n_ = 0;
  int m_ = 0;
};

// Throws InvalidInput on an empty sequence.
Pattern pattern_of(const TokenSequence& seq);
Profile profile_of(const Pattern& pattern);
Profile profile_of(const TokenSequence& seq);

// 1^{mu_1} 2^{mu_2} ... m^{mu_m} with mu_1 >= mu_2 >= ... >= mu_m.
Pattern canonical_pattern(const Profile& profile);

// Empty profile or {1:1}.
bool is_trivial(const Profile& profile);

// All profiles of total length n, one per integer partition of n, in
// decreasing lexicographic order of their nonincreasing multiplicity lists.
std::vector<Profile> profiles_of_length(int n);

// All patterns of length n (restricted growth strings), in lexicographic
// order.
std::vector<Pattern> patterns_of_length(int n);

}  // namespace profilest
