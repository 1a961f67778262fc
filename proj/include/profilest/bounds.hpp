#pragma once

// Analytic certificates that every pattern-maximum-likelihood distribution
// of a profile must satisfy.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "profilest/patterns.hpp"

namespace profilest {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

// Reduced fraction; den must be positive.
Rational make_rational(std::int64_t num, std::int64_t den);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Upper bound on the total support size. std::nullopt means unbounded
// (some symbol appears once). Throws InvalidInput on trivial profiles.
std::optional<std::int64_t> support_upper_bound(const Profile& profile);

// Lower bound on the total support size, m - 1 + S / (2^{mu_max} - 2) where
// S sums 2^{-mu_j} over all symbols but one of maximal multiplicity.
// Infinite when every symbol is a singleton. Throws InvalidInput on
// trivial profiles.
double support_lower_bound(const Profile& profile);

// phi_1 / n. Throws InvalidInput on trivial profiles.
Rational continuous_mass_cap(const Profile& profile);

// n >= 2 and at most one singleton.
bool is_discrete_forced(const Profile& profile);

// min(2^m, n - 1).
std::int64_t distinct_values_cap(const Profile& profile);

struct CorollaryFlags {
  bool k_equals_m = false;    // mu_min > log2(m + 1)
  bool s_exceeds_m = false;   // mu_max < log2(sqrt(m) + 1)
};

CorollaryFlags corollary_flags(const Profile& profile);

struct BoundsReport {
  std::optional<std::int64_t> support_upper;  // nullopt = infinite
  double support_lower = 0.0;                 // may be +inf
  Rational continuous_cap{1, 1};
  bool discrete_forced = false;
  std::int64_t distinct_values_cap = 0;
  bool k_equals_m = false;
  bool s_exceeds_m = false;
};

// All of the above at once. Trivial profiles get the vacuous report
// (no upper bound, lower bound 0, cap 1, nothing forced).
BoundsReport bounds_report(const Profile& profile);

}  // namespace profilest
