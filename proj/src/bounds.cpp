#include "profilest/bounds.hpp"

#include <cmath>
#include <numeric>

#include "profilest/error.hpp"

namespace profilest {

namespace {

void require_nontrivial(const Profile& profile, const char* what) {
  if (is_trivial(profile)) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + " needs a nontrivial profile");
  }
}

}  // namespace

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw Error(ErrorKind::InvalidInput, "rational needs a positive denominator");
  const std::int64_t g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::optional<std::int64_t> support_upper_bound(const Profile& profile) {
  require_nontrivial(profile, "support upper bound");
  const int mu_min = profile.mu_min();
  if (mu_min == 1) return std::nullopt;
  const std::int64_t m = profile.m();
  // floor(m + (m-1)/(2^mu_min - 2)); the denominator overflows long before
  // the quotient matters, so large mu_min just gives m.
  if (mu_min >= 62) return m;
  const std::int64_t denom = (std::int64_t{1} << mu_min) - 2;
  return m + (m - 1) / denom;
}

double support_lower_bound(const Profile& profile) {
  require_nontrivial(profile, "support lower bound");
  const int mu_max = profile.mu_max();
  if (mu_max == 1) return kInfinity;
  // Sum 2^{-mu_j} over every symbol except one with multiplicity mu_max.
  double sum = 0.0;
  for (auto [mu, phi] : profile.prevalences()) {
    const int count = mu == mu_max ? phi - 1 : phi;
    sum += count * std::ldexp(1.0, -mu);
  }
  const double denom = std::ldexp(1.0, mu_max) - 2.0;
  return profile.m() - 1 + sum / denom;
}

Rational continuous_mass_cap(const Profile& profile) {
  require_nontrivial(profile, "continuous mass cap");
  return make_rational(profile.singletons(), profile.n());
}

bool is_discrete_forced(const Profile& profile) {
  return profile.n() >= 2 && profile.singletons() <= 1;
}

std::int64_t distinct_values_cap(const Profile& profile) {
  const std::int64_t n_minus_1 = profile.n() - 1;
  if (profile.m() >= 62) return n_minus_1;
  return std::min<std::int64_t>(std::int64_t{1} << profile.m(), n_minus_1);
}

CorollaryFlags corollary_flags(const Profile& profile) {
  CorollaryFlags flags;
  const double m = profile.m();
  flags.k_equals_m = profile.mu_min() > std::log2(m + 1.0);
  flags.s_exceeds_m = profile.mu_max() < std::log2(std::sqrt(m) + 1.0);
  return flags;
}

BoundsReport bounds_report(const Profile& profile) {
  BoundsReport r;
  if (is_trivial(profile)) {
    r.distinct_values_cap = profile.empty() ? 0 : 1;
    return r;
  }
  r.support_upper = support_upper_bound(profile);
  r.support_lower = support_lower_bound(profile);
  r.continuous_cap = continuous_mass_cap(profile);
  r.discrete_forced = is_discrete_forced(profile);
  r.distinct_values_cap = distinct_values_cap(profile);
  const auto flags = corollary_flags(profile);
  r.k_equals_m = flags.k_equals_m;
  r.s_exceeds_m = flags.s_exceeds_m;
  return r;
}

}  // namespace profilest
