#pragma once

// Approximate pattern maximum likelihood for long patterns by
// expectation-maximization.
//
// The latent variable is the assignment of the pattern's m symbols to k
// support slots (injective), with singletons optionally drawn from the
// continuous part instead. Given current probabilities, an assignment has
// weight prod_s p_s^{mu(symbol at s)} * q^{#continuous singletons}, and the
// pattern probability is the sum of all weights. The E-step needs the
// posterior expected number of observations on each slot; it is computed by
// enumeration when the number of assignments is small, otherwise by
// Metropolis sampling over assignments. The M-step sets every slot to its
// expected count over n.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "profilest/patterns.hpp"
#include "profilest/pml_exact.hpp"
#include "profilest/probability.hpp"
#include "profilest/random.hpp"

namespace profilest {

struct EmConfig {
  int k = 1;
  bool q_enabled = false;
  int iterations = 500;
  int chains = 4;
  int mcmc_steps_per_estep = 2000;
  int burn_in = 200;
  std::uint64_t seed = 0;
  // Enumerate assignments when k falling m * 2^{phi_1} is at most this.
  std::uint64_t exact_estep_threshold = 1'000'000;
  // Exact E-steps: stop once an iteration improves the pattern probability by
  // less than this fraction. Sampled E-steps: stop after 25 iterations
  // without beating the best probability by this fraction.
  double tolerance = 1e-12;
  // Optional progress stream: "iteration\tlog_probability\tacceptance_rate".
  std::ostream* progress = nullptr;
};

// Symbol -> slot map; kContinuous marks a singleton drawn from the
// continuous part. Symbols are those of the canonical pattern, ordered by
// nonincreasing multiplicity.
struct Assignment {
  static constexpr int kContinuous = -1;
  std::vector<int> slot_of_symbol;

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

// Calls `visit(assignment, log_weight)` for every feasible assignment with
// nonzero weight.
void enumerate_assignments(const Profile& profile, std::span<const double> slots, double q,
                           bool q_enabled,
                           const std::function<void(const Assignment&, double)>& visit);

// Metropolis chain over assignments. Proposals: with probability 1/2 swap
// the occupants of two slots, otherwise move a uniformly chosen singleton
// between its slot and the continuous part (to a uniformly chosen empty
// slot when coming back). Only the swap is used when no singleton can move.
class AssignmentSampler {
 public:
  AssignmentSampler(const Profile& profile, int k, bool q_enabled, std::uint64_t seed);

  // New slot probabilities; keeps the current assignment.
  void set_parameters(std::span<const double> slots, double q);

  void step();
  const Assignment& state() const { return state_; }
  double acceptance_rate() const;

  // Observations currently on each slot, and singletons on the continuous part.
  void add_counts(std::vector<double>& slot_counts, double& continuous_count) const;

 private:
  double log_slot(int slot) const;

  std::vector<int> mult_;
  std::vector<int> singletons_;       // symbol ids with multiplicity 1
  std::vector<int> occupant_;         // slot -> symbol or -1
  Assignment state_;
  std::vector<double> log_p_;
  double log_q_ = 0.0;
  bool q_enabled_;
  int empty_slots_ = 0;
  Rng rng_;
  std::uint64_t proposed_ = 0, accepted_ = 0;
};

struct EmTrace {
  std::vector<double> log_probability;  // per iteration, at the parameters entering it
  std::vector<double> acceptance_rate;  // empty in exact mode
  bool exact_estep = false;
  int iterations_run = 0;
};

// Throws Infeasible when k < m (or k < m - phi_1 with q enabled), and
// InvalidInput for a trivial pattern or nonpositive counts.
PmlResult em_pml(const Pattern& pattern, const EmConfig& cfg, EmTrace* trace = nullptr);

struct ProbabilityEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

// Sequential importance sampling over assignments: symbols are placed one at
// a time on an unused slot (or the continuous part) with probability
// proportional to its weight, and the sample weight is the product of the
// normalizers. Unbiased for pattern_prob(d, pattern). Uses
// cfg.chains * cfg.mcmc_steps_per_estep samples and cfg.seed.
ProbabilityEstimate em_probability_estimate(const Pattern& pattern, const Distribution& d,
                                            const EmConfig& cfg);

}  // namespace profilest
