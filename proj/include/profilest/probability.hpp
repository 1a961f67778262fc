#pragma once

// Probability a distribution induces on a pattern.
//
// A distribution is a nonincreasing vector of discrete atoms plus the
// leftover continuous mass q. A continuous draw never repeats, so in a
// pattern it can only account for a symbol that appears once. The pattern
// probability is the sum, over all ways of placing the pattern's symbols on
// distinct atoms (singletons may instead come from the continuous part), of
// the product of atom^multiplicity and q^(#continuous singletons).

#include <cstdint>
#include <span>
#include <vector>

#include "profilest/patterns.hpp"

namespace profilest {

class Distribution {
 public:
  // Fully continuous distribution "()".
  Distribution() = default;

  // Atoms in any order; q = 1 - sum. Zero atoms are dropped. Throws
  // InvalidDistribution for negative atoms, atoms above one, or total mass
  // above one by more than the tolerance.
  explicit Distribution(std::vector<double> atoms);

  // Atoms with an explicit continuous part; atoms + q must sum to one
  // within tolerance.
  static Distribution mixed(std::vector<double> atoms, double q);

  static Distribution uniform(int k);

  std::span<const double> atoms() const { return atoms_; }
  int discrete_size() const { return static_cast<int>(atoms_.size()); }
  double discrete_mass() const { return 1.0 - q_; }
  double continuous_mass() const { return q_; }
  bool is_discrete() const { return q_ == 0.0; }

  static constexpr double kMassTolerance = 1e-9;

 private:
  std::vector<double> atoms_;
  double q_ = 1.0;
};

enum class ProbabilityMethod { ExactSum, UniformFastPath, BruteForceOracle };

const char* to_string(ProbabilityMethod method);

struct PatternProbability {
  double value = 0.0;
  // log(value), natural log; stays finite where value underflows.
  double log_value = 0.0;
  ProbabilityMethod method = ProbabilityMethod::ExactSum;
};

// Work cap for the exact evaluator. Defaults to 2e8 units unless the
// PROFILEST_MAX_WORK environment variable holds a positive integer.
std::uint64_t default_work_cap();

// Work units the exact evaluator would spend on (k atoms, profile):
// k * (number of partially-assigned profile states) * (distinct
// multiplicities). Saturates at UINT64_MAX.
std::uint64_t exact_work(int k, const Profile& profile);

// Number of assignments summed by the defining formula:
// k falling m * 2^{phi_1}. Saturates at UINT64_MAX.
std::uint64_t injection_count(int k, const Profile& profile);

// Exact pattern probability. The value depends on the pattern only through
// its profile. Uses the falling-power fast path when all atoms are equal and
// q = 0. Throws ResourceLimit when exact_work exceeds work_cap.
PatternProbability pattern_prob(const Distribution& d, const Profile& profile,
                                std::uint64_t work_cap = default_work_cap());
PatternProbability pattern_prob(const Distribution& d, const Pattern& pattern,
                                std::uint64_t work_cap = default_work_cap());

// k falling m over k^n; zero when m > k. Throws InvalidInput when m > n,
// m < 0, or k < 1.
PatternProbability pattern_prob_uniform(int k, int m, int n);

// Enumerates all k^n sequences over the atoms of a discrete distribution and
// adds up those whose pattern equals `pattern`. Throws ResourceLimit above
// kOracleLimit sequences and NotApplicable for q > 0.
PatternProbability pattern_prob_oracle(const Distribution& d, const Pattern& pattern);
inline constexpr std::uint64_t kOracleLimit = 10'000'000;

// Evaluation on raw, unsorted coordinates, used by the optimizers. `atoms`
// may contain zeros. Partial derivatives treat q as an independent
// coordinate, so sum_j x_j * d_j = n * value (Euler).
struct ProbabilityGradient {
  double log_value = 0.0;  // -inf when the value is exactly zero
  // d value / d atom_j divided by value (log-gradient); empty when value == 0.
  std::vector<double> d_log_atoms;
  double d_log_q = 0.0;
};

double pattern_log_prob_raw(std::span<const double> atoms, double q,
                            const Profile& profile,
                            std::uint64_t work_cap = default_work_cap());

ProbabilityGradient pattern_prob_gradient(std::span<const double> atoms, double q,
                                          const Profile& profile,
                                          std::uint64_t work_cap = default_work_cap());

}  // namespace profilest
