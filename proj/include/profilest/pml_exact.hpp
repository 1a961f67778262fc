#pragma once

// Pattern maximum likelihood: the distribution that gives the observed
// profile the highest probability.
//
// Closed forms cover constant, all-distinct, two-symbol and uniform
// profiles. Everything else goes through a sweep over candidate support
// sizes with a multi-start projected-gradient search inside each.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "profilest/bounds.hpp"
#include "profilest/patterns.hpp"
#include "profilest/probability.hpp"

namespace profilest {

enum class PmlMethod { Trivial, BinaryClosedForm, UniformProfile, NumericSearch, EmApprox };

const char* to_string(PmlMethod method);

struct PmlResult {
  Distribution distribution;
  double probability = 0.0;
  double log_probability = 0.0;
  PmlMethod method = PmlMethod::Trivial;
  BoundsReport certificates;
  bool converged = false;
  std::int64_t candidates_examined = 0;
};

struct SearchConfig {
  // Inclusive [lo, hi] range of discrete support sizes to sweep. Required
  // when the profile has singletons (no finite upper bound).
  std::optional<std::pair<int, int>> k_range_override;
  int starts = 32;
  int max_iterations = 5000;
  double gradient_tolerance = 1e-8;
  std::uint64_t seed = 0;
  // Skip the closed forms and always search numerically.
  bool force_numeric = false;
  std::uint64_t work_cap = default_work_cap();
};

// Human-readable list of the certificates `d` violates; empty when all hold.
std::vector<std::string> certificate_violations(const BoundsReport& report,
                                                const Distribution& d);

// Constant {n:1}, all-distinct {1:n}, and the trivial profiles. Throws
// NotApplicable otherwise.
PmlResult pml_trivial(const Profile& profile);

// Two symbols appearing n0 <= n1 times.
PmlResult pml_binary(int n0, int n1);

// Every one of m symbols appears r >= 2 times.
PmlResult pml_uniform_profile(int r, int m);

// Support size the closed form above picks.
std::int64_t uniform_profile_support(int r, int m);

// alpha > 1 with -alpha * ln(1 - 1/alpha) = r: the limit of k/m for the
// uniform profile r^m as m grows.
double pml_uniform_ratio_limit(int r);

// Closed form when one applies, numeric search otherwise (or always, with
// cfg.force_numeric). Throws UnboundedSearch when the profile has
// singletons and no k range is given.
PmlResult pml_search(const Profile& profile, const SearchConfig& cfg = {});

// Common value of the atom partial derivatives at a stationary point is
// lambda; returns max - min of dP/dp_j over the atoms of d.
double stationarity_spread(const Distribution& d, const Profile& profile);

// Table of the closed-form answers for all profiles of length at most 4.
struct Table1Row {
  Profile profile;
  Pattern canonical;
  std::string expected;          // e.g. "(1/2, 1/2)"
  Distribution expected_distribution;
  PmlResult computed;
  double expected_probability = 0.0;
  bool match = false;
};

std::vector<Table1Row> reproduce_table1(std::uint64_t seed = 0);

}  // namespace profilest
