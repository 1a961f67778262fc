#include "profilest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "profilest/error.hpp"

namespace profilest {

Distribution ml_distribution(const TokenSequence& seq) {
  if (seq.empty()) throw Error(ErrorKind::InvalidInput, "empty sequence");
  std::unordered_map<std::string_view, int> counts;
  for (const auto& tok : seq.tokens) ++counts[tok];
  std::vector<int> c;
  for (auto& [tok, v] : counts) c.push_back(v);
  std::sort(c.begin(), c.end(), std::greater<>());
  std::vector<double> atoms;
  const double n = static_cast<double>(seq.size());
  for (int v : c) atoms.push_back(v / n);
  // Guard against the sum landing a hair below one.
  const double total = std::accumulate(atoms.begin(), atoms.end(), 0.0);
  for (double& a : atoms) a /= total;
  return Distribution(std::move(atoms));
}

double kl_divergence(const Distribution& a, const Distribution& b) {
  if (!a.is_discrete() || !b.is_discrete()) {
    throw Error(ErrorKind::NotApplicable, "divergence needs discrete distributions");
  }
  const auto pa = a.atoms();
  const auto pb = b.atoms();
  double d = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double ai = pa[i];
    const double bi = i < pb.size() ? pb[i] : 0.0;
    if (ai <= 0.0) continue;
    if (bi <= 0.0) return kInfinity;
    d += ai * std::log2(ai / bi);
  }
  return std::max(d, 0.0);
}

double entropy(const Distribution& a) {
  double h = 0.0;
  for (double p : a.atoms()) h -= p * std::log2(p);
  return h;
}

double l1_distance(const Distribution& a, const Distribution& b) {
  const auto pa = a.atoms();
  const auto pb = b.atoms();
  const std::size_t n = std::max(pa.size(), pb.size());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d += std::abs((i < pa.size() ? pa[i] : 0.0) - (i < pb.size() ? pb[i] : 0.0));
  }
  return d + std::abs(a.continuous_mass() - b.continuous_mass());
}

double expected_new_symbols(const Distribution& d, int observed_m, std::int64_t t) {
  if (t < 0 || observed_m < 0) throw Error(ErrorKind::InvalidInput, "counts must be nonnegative");
  if (t == 0) return 0.0;
  const auto atoms = d.atoms();
  double expected = d.continuous_mass() * static_cast<double>(t);
  for (std::size_t i = static_cast<std::size_t>(observed_m); i < atoms.size(); ++i) {
    // 1 - (1-p)^t without cancellation for small p.
    expected += atoms[i] >= 1.0 ? 1.0 : -std::expm1(static_cast<double>(t) * std::log1p(-atoms[i]));
  }
  return expected;
}

AlphaVector::AlphaVector(std::vector<double> probabilities) : values_(std::move(probabilities)) {
  if (values_.empty()) throw Error(ErrorKind::InvalidInput, "alpha vector is empty");
  for (double v : values_) {
    if (!(v > 0.0)) throw Error(ErrorKind::InvalidInput, "alpha entries must be positive");
  }
  std::sort(values_.begin(), values_.end(), std::greater<>());
  const double sum = std::accumulate(values_.begin(), values_.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorKind::InvalidInput, "alpha must sum to one");
}

Profile AlphaVector::profile_at(int n) const {
  if (n <= 0) throw Error(ErrorKind::InvalidInput, "sample size must be positive");
  std::vector<int> mult;
  for (double a : values_) {
    const double x = a * n;
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9 * std::max(1.0, x) || r < 1) {
      throw Error(ErrorKind::InvalidInput,
                  "alpha * n is not a positive integer for n = " + std::to_string(n));
    }
    mult.push_back(static_cast<int>(r));
  }
  return Profile::from_multiplicities(mult);
}

std::vector<ConvergenceRow> convergence_experiment(const AlphaVector& alpha,
                                                   const std::vector<int>& n_values,
                                                   const SearchConfig& search) {
  const Distribution truth = alpha.distribution();
  std::vector<ConvergenceRow> rows;
  for (int n : n_values) {
    ConvergenceRow row;
    row.n = n;
    row.profile = alpha.profile_at(n);
    const PmlResult pml = pml_search(row.profile, search);
    row.method = pml.method;
    row.k_hat = pml.distribution.discrete_size();
    row.q_hat = pml.distribution.continuous_mass();
    row.kl_bits = pml.distribution.is_discrete() ? kl_divergence(truth, pml.distribution) : kInfinity;
    row.l1 = l1_distance(truth, pml.distribution);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace profilest
