#pragma once

// Ordinary maximum likelihood, divergences between distributions, and
// predictions about future samples.

#include <cstdint>
#include <vector>

#include "profilest/patterns.hpp"
#include "profilest/pml_exact.hpp"
#include "profilest/probability.hpp"

namespace profilest {

// Relative token frequencies, nonincreasing, no continuous part.
Distribution ml_distribution(const TokenSequence& seq);

// Both arguments discrete; compares nonincreasing atom vectors position by
// position, padding the shorter with zeros. Returns +inf when some a_i > 0
// meets b_i = 0. Base-2 logarithms. Throws NotApplicable for continuous
// mass on either side.
double kl_divergence(const Distribution& a, const Distribution& b);

// -sum a_i log2 a_i; continuous mass is ignored.
double entropy(const Distribution& a);

// Sum of |a_i - b_i| over padded atoms plus |q_a - q_b|.
double l1_distance(const Distribution& a, const Distribution& b);

// Expected number of distinct, previously unseen symbols among t future
// draws. The largest observed_m atoms stand for the observed symbols; every
// other atom contributes 1 - (1 - p)^t and the continuous part q * t.
double expected_new_symbols(const Distribution& d, int observed_m, std::int64_t t);

class AlphaVector {
 public:
  // Sorted nonincreasing; must be positive and sum to one within 1e-12.
  explicit AlphaVector(std::vector<double> probabilities);

  std::span<const double> values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  Distribution distribution() const { return Distribution(values_); }

  // Profile of a length-n sequence in which symbol i appears alpha_i * n
  // times. Throws InvalidInput unless every alpha_i * n is an integer.
  Profile profile_at(int n) const;

 private:
  std::vector<double> values_;
};

struct ConvergenceRow {
  int n = 0;
  Profile profile;
  int k_hat = 0;
  double q_hat = 0.0;
  double kl_bits = 0.0;
  double l1 = 0.0;
  PmlMethod method = PmlMethod::Trivial;
};

// Pattern maximum likelihood of each alpha-profile against the generating
// distribution. `search` is used for profiles without a closed form.
std::vector<ConvergenceRow> convergence_experiment(const AlphaVector& alpha,
                                                   const std::vector<int>& n_values,
                                                   const SearchConfig& search = {});

}  // namespace profilest
