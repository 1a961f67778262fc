#include "profilest/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "profilest/error.hpp"

namespace profilest {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidDistribution: return "invalid-distribution";
    case ErrorKind::ResourceLimit: return "resource-limit";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::UnboundedSearch: return "unbounded-search";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Internal: return "internal-error";
  }
  return "unknown";
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_positive(std::string_view s, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || value <= 0) {
    throw Error(ErrorKind::InvalidInput,
                "expected a positive integer for " + std::string(what) + ", got '" +
                    std::string(s) + "'");
  }
  return value;
}

}  // namespace

TokenSequence TokenSequence::from_whitespace(std::string_view text) {
  TokenSequence seq;
  for (auto tok : split_ws(text)) seq.tokens.emplace_back(tok);
  return seq;
}

TokenSequence TokenSequence::from_lines(std::string_view text) {
  TokenSequence seq;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) seq.tokens.emplace_back(line);
    start = end + 1;
  }
  return seq;
}

TokenSequence TokenSequence::from_chars(std::string_view text) {
  TokenSequence seq;
  for (char c : text) seq.tokens.emplace_back(1, c);
  return seq;
}

// ---------------------------------------------------------------------------
// Pattern

Pattern::Pattern(std::vector<int> indices) : indices_(std::move(indices)) {
  int max_seen = 0;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    const int v = indices_[i];
    if (v < 1 || v > max_seen + 1) {
      throw Error(ErrorKind::InvalidInput,
                  "not a pattern: index " + std::to_string(v) + " at position " +
                      std::to_string(i + 1) + " violates the first-appearance order");
    }
    max_seen = std::max(max_seen, v);
  }
  m_ = max_seen;
}

Pattern Pattern::parse(std::string_view text) {
  auto fields = split_ws(text);
  std::vector<int> indices;
  if (fields.size() == 1 &&
      std::all_of(fields[0].begin(), fields[0].end(),
                  [](char c) { return c >= '1' && c <= '9'; })) {
    for (char c : fields[0]) indices.push_back(c - '0');
  } else {
    for (auto f : fields) indices.push_back(parse_positive(f, "pattern index"));
  }
  return Pattern(std::move(indices));
}

std::string Pattern::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(indices_[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Profile

Profile::Profile(const std::map<int, int>& prevalences) {
  for (auto [mu, phi] : prevalences) {
    if (mu <= 0) throw Error(ErrorKind::InvalidInput, "multiplicity must be positive");
    if (phi < 0) throw Error(ErrorKind::InvalidInput, "prevalence must be nonnegative");
    if (phi == 0) continue;
    prevalences_[mu] = phi;
    n_ += mu * phi;
    m_ += phi;
  }
}

Profile Profile::from_multiplicities(const std::vector<int>& multiplicities) {
  std::map<int, int> prev;
  for (int mu : multiplicities) {
    if (mu <= 0) throw Error(ErrorKind::InvalidInput, "multiplicity must be positive");
    ++prev[mu];
  }
  return Profile(prev);
}

Profile Profile::parse(std::string_view text) {
  std::map<int, int> prev;
  for (auto factor : split_ws(text)) {
    const auto caret = factor.find('^');
    const int mu = parse_positive(factor.substr(0, caret), "multiplicity");
    const int phi = caret == std::string_view::npos
                        ? 1
                        : parse_positive(factor.substr(caret + 1), "prevalence");
    prev[mu] += phi;
  }
  return Profile(prev);
}

int Profile::mu_min() const {
  return prevalences_.empty() ? 0 : prevalences_.begin()->first;
}

int Profile::mu_max() const {
  return prevalences_.empty() ? 0 : prevalences_.rbegin()->first;
}

int Profile::prevalence(int mu) const {
  auto it = prevalences_.find(mu);
  return it == prevalences_.end() ? 0 : it->second;
}

std::vector<int> Profile::multiplicities() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(m_));
  for (auto it = prevalences_.rbegin(); it != prevalences_.rend(); ++it) {
    out.insert(out.end(), static_cast<std::size_t>(it->second), it->first);
  }
  return out;
}

std::string Profile::to_string() const {
  std::string out;
  for (auto [mu, phi] : prevalences_) {
    if (!out.empty()) out += ' ';
    out += std::to_string(mu) + '^' + std::to_string(phi);
  }
  return out;
}

// ---------------------------------------------------------------------------

Pattern pattern_of(const TokenSequence& seq) {
  if (seq.empty()) throw Error(ErrorKind::InvalidInput, "empty sequence has no pattern");
  std::unordered_map<std::string_view, int> first_seen;
  std::vector<int> indices;
  indices.reserve(seq.size());
  for (const auto& tok : seq.tokens) {
    auto [it, inserted] =
        first_seen.try_emplace(tok, static_cast<int>(first_seen.size()) + 1);
    indices.push_back(it->second);
  }
  return Pattern(std::move(indices));
}

Profile profile_of(const Pattern& pattern) {
  std::vector<int> counts(static_cast<std::size_t>(pattern.m()), 0);
  for (int v : pattern.indices()) ++counts[static_cast<std::size_t>(v - 1)];
  return Profile::from_multiplicities(counts);
}

Profile profile_of(const TokenSequence& seq) {
  std::unordered_map<std::string_view, int> counts;
  for (const auto& tok : seq.tokens) ++counts[tok];
  std::vector<int> mult;
  mult.reserve(counts.size());
  for (auto& [tok, c] : counts) mult.push_back(c);
  return Profile::from_multiplicities(mult);
}

Pattern canonical_pattern(const Profile& profile) {
  std::vector<int> indices;
  indices.reserve(static_cast<std::size_t>(profile.n()));
  int symbol = 0;
  for (int mu : profile.multiplicities()) {
    ++symbol;
    indices.insert(indices.end(), static_cast<std::size_t>(mu), symbol);
  }
  return Pattern(std::move(indices));
}

bool is_trivial(const Profile& profile) {
  return profile.empty() || (profile.n() == 1 && profile.m() == 1);
}

std::vector<Profile> profiles_of_length(int n) {
  std::vector<Profile> out;
  if (n <= 0) return out;
  std::vector<int> parts;
  std::function<void(int, int)> rec = [&](int remaining, int largest) {
    if (remaining == 0) {
      out.push_back(Profile::from_multiplicities(parts));
      return;
    }
    for (int part = std::min(remaining, largest); part >= 1; --part) {
      parts.push_back(part);
      rec(remaining - part, part);
      parts.pop_back();
    }
  };
  rec(n, n);
  return out;
}

std::vector<Pattern> patterns_of_length(int n) {
  std::vector<Pattern> out;
  if (n <= 0) return out;
  std::vector<int> idx(static_cast<std::size_t>(n), 1);
  std::function<void(int, int)> rec = [&](int pos, int max_so_far) {
    if (pos == n) {
      out.emplace_back(idx);
      return;
    }
    for (int v = 1; v <= max_so_far + 1; ++v) {
      idx[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, std::max(max_so_far, v));
    }
  };
  rec(1, 1);
  return out;
}

}  // namespace profilest
