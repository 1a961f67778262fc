#include "profilest/pml_em.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "profilest/error.hpp"

namespace profilest {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Depth-first walk over assignments of symbols (in order) to unused slots or,
// for singletons, the continuous part. `weight` is multiplied along the path;
// `leaf(weight)` runs for every complete assignment with nonzero weight.
template <typename Leaf>
void walk_assignments(const std::vector<int>& mult, std::span<const long double> slots,
                      long double q, bool q_enabled, std::vector<int>& slot_of,
                      std::vector<char>& used, std::size_t pos, long double weight, Leaf&& leaf) {
  if (weight == 0) return;
  if (pos == mult.size()) {
    leaf(weight);
    return;
  }
  const int mu = mult[pos];
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (used[s]) continue;
    used[s] = 1;
    slot_of[pos] = static_cast<int>(s);
    walk_assignments(mult, slots, q, q_enabled, slot_of, used, pos + 1,
                     weight * std::pow(slots[s], mu), leaf);
    used[s] = 0;
  }
  if (mu == 1 && q_enabled) {
    slot_of[pos] = Assignment::kContinuous;
    walk_assignments(mult, slots, q, q_enabled, slot_of, used, pos + 1, weight * q, leaf);
  }
}

struct ScaledSlots {
  std::vector<long double> slots;
  long double q = 0;
  double log_scale = 0.0;
};

ScaledSlots scale(std::span<const double> slots, double q) {
  double s = q;
  for (double p : slots) s = std::max(s, p);
  ScaledSlots out;
  if (s <= 0) s = 1.0;
  out.log_scale = std::log(s);
  for (double p : slots) out.slots.push_back(static_cast<long double>(p) / s);
  out.q = static_cast<long double>(q) / s;
  return out;
}

void check_feasible(const Profile& profile, int k, bool q_enabled) {
  const int needed = q_enabled ? profile.m() - profile.singletons() : profile.m();
  if (k < needed || k < 0) {
    throw Error(ErrorKind::Infeasible,
                "support size " + std::to_string(k) + " cannot host the " +
                    std::to_string(needed) + " symbols that need an atom");
  }
}

struct EStep {
  std::vector<double> slot_counts;
  double continuous_count = 0.0;
  double log_probability = kNegInf;
  double acceptance = 0.0;
};

EStep exact_estep(const std::vector<int>& mult, std::span<const double> slots, double q,
                  bool q_enabled, int n) {
  const ScaledSlots sc = scale(slots, q);
  const std::size_t k = slots.size();
  std::vector<long double> acc(k, 0);
  long double acc_c = 0, total = 0;
  std::vector<int> slot_of(mult.size(), 0);
  std::vector<char> used(k, 0);
  walk_assignments(mult, sc.slots, sc.q, q_enabled, slot_of, used, 0, 1.0L, [&](long double w) {
    total += w;
    for (std::size_t j = 0; j < mult.size(); ++j) {
      if (slot_of[j] == Assignment::kContinuous) {
        acc_c += w;
      } else {
        acc[static_cast<std::size_t>(slot_of[j])] += w * mult[j];
      }
    }
  });
  EStep e;
  e.slot_counts.assign(k, 0.0);
  if (total <= 0) return e;
  for (std::size_t s = 0; s < k; ++s) e.slot_counts[s] = static_cast<double>(acc[s] / total);
  e.continuous_count = static_cast<double>(acc_c / total);
  e.log_probability = static_cast<double>(std::log(total)) + n * sc.log_scale;
  return e;
}

std::vector<double> initial_slots(const Profile& profile, const EmConfig& cfg, double& q) {
  const auto mult = profile.multiplicities();
  const int n = profile.n();
  const int m = profile.m();
  std::vector<double> slots(static_cast<std::size_t>(cfg.k), 0.0);
  for (int s = 0; s < cfg.k; ++s) {
    slots[static_cast<std::size_t>(s)] =
        s < m ? static_cast<double>(mult[static_cast<std::size_t>(s)]) / n : 1.0 / n;
  }
  // Seeded jitter so different seeds start from different points.
  if (cfg.k > 0) {
    Rng rng(mix_seed(cfg.seed, 0xE11));
    const auto dir = rng.dirichlet1(static_cast<std::size_t>(cfg.k));
    const double total = std::accumulate(slots.begin(), slots.end(), 0.0);
    for (int s = 0; s < cfg.k; ++s) {
      auto& v = slots[static_cast<std::size_t>(s)];
      v = 0.9 * v / total + 0.1 * dir[static_cast<std::size_t>(s)];
    }
  }
  q = cfg.q_enabled ? static_cast<double>(profile.singletons()) / (2.0 * n) : 0.0;
  if (cfg.k == 0) q = 1.0;
  const double total = std::accumulate(slots.begin(), slots.end(), 0.0);
  for (double& v : slots) v *= (1.0 - q) / total;
  return slots;
}

// Sampled E-steps without a new best before EM stops.
constexpr int kSampledPatience = 25;

// Atoms below this are numerically absent in the returned distribution.
constexpr double kDropAtom = 1e-9;

Distribution to_distribution(std::span<const double> slots, double q) {
  std::vector<double> atoms;
  double mass = 0.0;
  for (double p : slots) {
    if (p > kDropAtom) {
      atoms.push_back(p);
      mass += p;
    }
  }
  if (q <= kDropAtom) q = 0.0;
  const double total = mass + q;
  for (double& a : atoms) a /= total;
  if (q == 0.0) return Distribution(std::move(atoms));
  return Distribution::mixed(std::move(atoms), q / total);
}

}  // namespace

void enumerate_assignments(const Profile& profile, std::span<const double> slots, double q,
                           bool q_enabled,
                           const std::function<void(const Assignment&, double)>& visit) {
  const auto mult = profile.multiplicities();
  const ScaledSlots sc = scale(slots, q);
  std::vector<int> slot_of(mult.size(), 0);
  std::vector<char> used(slots.size(), 0);
  Assignment a;
  walk_assignments(mult, sc.slots, sc.q, q_enabled, slot_of, used, 0, 1.0L, [&](long double w) {
    a.slot_of_symbol = slot_of;
    visit(a, static_cast<double>(std::log(w)) + profile.n() * sc.log_scale);
  });
}

// ---------------------------------------------------------------------------
// AssignmentSampler

AssignmentSampler::AssignmentSampler(const Profile& profile, int k, bool q_enabled,
                                     std::uint64_t seed)
    : mult_(profile.multiplicities()), q_enabled_(q_enabled), rng_(seed) {
  check_feasible(profile, k, q_enabled);
  occupant_.assign(static_cast<std::size_t>(k), -1);
  state_.slot_of_symbol.assign(mult_.size(), Assignment::kContinuous);
  // Symbols come in nonincreasing multiplicity, so the ones that must sit
  // on an atom are placed first.
  int next = 0;
  for (std::size_t j = 0; j < mult_.size(); ++j) {
    if (mult_[j] == 1) singletons_.push_back(static_cast<int>(j));
    if (next < k) {
      state_.slot_of_symbol[j] = next;
      occupant_[static_cast<std::size_t>(next)] = static_cast<int>(j);
      ++next;
    }
  }
  empty_slots_ = k - next;
  log_p_.assign(static_cast<std::size_t>(k), 0.0);
}

void AssignmentSampler::set_parameters(std::span<const double> slots, double q) {
  if (slots.size() != log_p_.size()) {
    throw Error(ErrorKind::InvalidInput, "sampler slot count mismatch");
  }
  for (std::size_t s = 0; s < slots.size(); ++s) {
    log_p_[s] = slots[s] > 0 ? std::log(slots[s]) : kNegInf;
  }
  log_q_ = q > 0 ? std::log(q) : kNegInf;
}

double AssignmentSampler::log_slot(int slot) const {
  return slot == Assignment::kContinuous ? log_q_ : log_p_[static_cast<std::size_t>(slot)];
}

void AssignmentSampler::step() {
  const int k = static_cast<int>(occupant_.size());
  const bool singleton_move = q_enabled_ && !singletons_.empty() && rng_.uniform() < 0.5;
  ++proposed_;
  if (!singleton_move) {
    if (k < 2) return;
    const int a = static_cast<int>(rng_.below(static_cast<std::uint64_t>(k)));
    int b = static_cast<int>(rng_.below(static_cast<std::uint64_t>(k - 1)));
    if (b >= a) ++b;
    const int ja = occupant_[static_cast<std::size_t>(a)];
    const int jb = occupant_[static_cast<std::size_t>(b)];
    const int mu_a = ja >= 0 ? mult_[static_cast<std::size_t>(ja)] : 0;
    const int mu_b = jb >= 0 ? mult_[static_cast<std::size_t>(jb)] : 0;
    double log_ratio = 0.0;
    if (mu_a != mu_b) log_ratio = (mu_a - mu_b) * (log_slot(b) - log_slot(a));
    if (!(log_ratio >= 0.0) && !(std::log(rng_.uniform()) < log_ratio)) return;
    occupant_[static_cast<std::size_t>(a)] = jb;
    occupant_[static_cast<std::size_t>(b)] = ja;
    if (ja >= 0) state_.slot_of_symbol[static_cast<std::size_t>(ja)] = b;
    if (jb >= 0) state_.slot_of_symbol[static_cast<std::size_t>(jb)] = a;
    ++accepted_;
    return;
  }

  const int sym = singletons_[rng_.below(singletons_.size())];
  const int slot = state_.slot_of_symbol[static_cast<std::size_t>(sym)];
  if (slot != Assignment::kContinuous) {
    // Reverse move picks this slot among empty_slots_ + 1 empty ones.
    const double log_ratio = log_q_ - log_slot(slot) - std::log(empty_slots_ + 1.0);
    if (!(log_ratio >= 0.0) && !(std::log(rng_.uniform()) < log_ratio)) return;
    occupant_[static_cast<std::size_t>(slot)] = -1;
    state_.slot_of_symbol[static_cast<std::size_t>(sym)] = Assignment::kContinuous;
    ++empty_slots_;
  } else {
    if (empty_slots_ == 0) return;
    auto r = rng_.below(static_cast<std::uint64_t>(empty_slots_));
    int target = -1;
    for (int s = 0; s < k; ++s) {
      if (occupant_[static_cast<std::size_t>(s)] == -1 && r-- == 0) {
        target = s;
        break;
      }
    }
    const double log_ratio = log_slot(target) - log_q_ + std::log(static_cast<double>(empty_slots_));
    if (!(log_ratio >= 0.0) && !(std::log(rng_.uniform()) < log_ratio)) return;
    occupant_[static_cast<std::size_t>(target)] = sym;
    state_.slot_of_symbol[static_cast<std::size_t>(sym)] = target;
    --empty_slots_;
  }
  ++accepted_;
}

double AssignmentSampler::acceptance_rate() const {
  return proposed_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposed_);
}

void AssignmentSampler::add_counts(std::vector<double>& slot_counts, double& continuous_count) const {
  for (std::size_t j = 0; j < mult_.size(); ++j) {
    const int s = state_.slot_of_symbol[j];
    if (s == Assignment::kContinuous) {
      continuous_count += 1.0;
    } else {
      slot_counts[static_cast<std::size_t>(s)] += mult_[j];
    }
  }
}

// ---------------------------------------------------------------------------

ProbabilityEstimate em_probability_estimate(const Pattern& pattern, const Distribution& d,
                                            const EmConfig& cfg) {
  if (cfg.chains < 1 || cfg.mcmc_steps_per_estep < 1) {
    throw Error(ErrorKind::InvalidInput, "chains and steps must be positive");
  }
  const Profile profile = profile_of(pattern);
  const auto mult = profile.multiplicities();
  const ScaledSlots sc = scale(d.atoms(), d.continuous_mass());
  const std::size_t k = sc.slots.size();
  const bool q_on = d.continuous_mass() > 0;

  long double sum = 0, sum_sq = 0;
  std::uint64_t samples = 0;
  std::vector<char> used(k, 0);
  std::vector<long double> opt(k + 1, 0);
  for (int c = 0; c < cfg.chains; ++c) {
    Rng rng(mix_seed(cfg.seed, 0x515'0000ULL + static_cast<std::uint64_t>(c)));
    for (int t = 0; t < cfg.mcmc_steps_per_estep; ++t) {
      std::fill(used.begin(), used.end(), 0);
      long double w = 1;
      for (int mu : mult) {
        long double total = 0;
        for (std::size_t s = 0; s < k; ++s) {
          opt[s] = used[s] ? 0 : std::pow(sc.slots[s], mu);
          total += opt[s];
        }
        opt[k] = (mu == 1 && q_on) ? sc.q : 0;
        total += opt[k];
        if (total <= 0) {
          w = 0;
          break;
        }
        w *= total;
        long double u = static_cast<long double>(rng.uniform()) * total;
        std::size_t pick = k;
        for (std::size_t s = 0; s <= k; ++s) {
          if (opt[s] <= 0) continue;
          pick = s;
          if (u < opt[s]) break;
          u -= opt[s];
        }
        if (pick < k) used[pick] = 1;
      }
      sum += w;
      sum_sq += w * w;
      ++samples;
    }
  }
  const long double mean = sum / samples;
  long double var = samples > 1 ? (sum_sq - samples * mean * mean) / (samples - 1) : 0;
  if (var < 0) var = 0;
  const long double factor = std::exp(static_cast<long double>(profile.n() * sc.log_scale));
  ProbabilityEstimate est;
  est.value = static_cast<double>(mean * factor);
  est.standard_error = static_cast<double>(std::sqrt(var / samples) * factor);
  est.samples = samples;
  return est;
}

PmlResult em_pml(const Pattern& pattern, const EmConfig& cfg, EmTrace* trace) {
  const Profile profile = profile_of(pattern);
  if (is_trivial(profile)) throw Error(ErrorKind::InvalidInput, "EM needs a nontrivial pattern");
  if (cfg.iterations < 1 || cfg.chains < 1 || cfg.mcmc_steps_per_estep < 1 || cfg.burn_in < 0) {
    throw Error(ErrorKind::InvalidInput, "EM iteration and sampling counts must be positive");
  }
  check_feasible(profile, cfg.k, cfg.q_enabled);
  const int n = profile.n();
  const auto mult = profile.multiplicities();
  const std::size_t k = static_cast<std::size_t>(cfg.k);
  const bool exact = injection_count(cfg.k, profile) <= cfg.exact_estep_threshold;
  const std::uint64_t work_cap = default_work_cap();
  const bool dp_ok = exact_work(cfg.k, profile) <= work_cap;

  double q = 0.0;
  std::vector<double> slots = initial_slots(profile, cfg, q);

  std::vector<AssignmentSampler> chains;
  if (!exact) {
    for (int c = 0; c < cfg.chains; ++c) {
      chains.emplace_back(profile, cfg.k, cfg.q_enabled, mix_seed(cfg.seed, static_cast<std::uint64_t>(c)));
    }
  }

  auto log_prob_of = [&](std::span<const double> s, double qq) {
    if (dp_ok) return pattern_log_prob_raw(s, qq, profile, work_cap);
    Distribution d = to_distribution(s, qq);
    EmConfig est_cfg = cfg;
    est_cfg.seed = mix_seed(cfg.seed, 0xE57);
    const auto est = em_probability_estimate(pattern, d, est_cfg);
    return est.value > 0 ? std::log(est.value) : kNegInf;
  };

  EmTrace local;
  EmTrace& tr = trace ? *trace : local;
  tr = EmTrace{};
  tr.exact_estep = exact;

  std::vector<double> best_slots = slots;
  double best_q = q;
  double best_lp = kNegInf;
  double prev_lp = kNegInf;
  int since_best = 0;
  bool stalled = false;

  for (int it = 0; it < cfg.iterations; ++it) {
    EStep e;
    if (exact) {
      e = exact_estep(mult, slots, q, cfg.q_enabled, n);
    } else {
      e.slot_counts.assign(k, 0.0);
      double acc_rate = 0.0;
      const double per_chain = static_cast<double>(cfg.mcmc_steps_per_estep);
      for (auto& chain : chains) {
        chain.set_parameters(slots, q);
        for (int b = 0; b < cfg.burn_in; ++b) chain.step();
        std::vector<double> counts(k, 0.0);
        double cont = 0.0;
        for (int t = 0; t < cfg.mcmc_steps_per_estep; ++t) {
          chain.step();
          chain.add_counts(counts, cont);
        }
        for (std::size_t s = 0; s < k; ++s) e.slot_counts[s] += counts[s] / per_chain;
        e.continuous_count += cont / per_chain;
        acc_rate += chain.acceptance_rate();
      }
      for (double& v : e.slot_counts) v /= static_cast<double>(chains.size());
      e.continuous_count /= static_cast<double>(chains.size());
      e.acceptance = acc_rate / static_cast<double>(chains.size());
      e.log_probability = log_prob_of(slots, q);
      tr.acceptance_rate.push_back(e.acceptance);
    }
    tr.log_probability.push_back(e.log_probability);
    tr.iterations_run = it + 1;
    if (cfg.progress) {
      *cfg.progress << it << '\t' << e.log_probability << '\t' << e.acceptance << '\n';
    }

    // Improvements are measured in log space, i.e. relative to the
    // probability; long patterns sit far below any absolute threshold.
    if (e.log_probability > best_lp + cfg.tolerance) {
      since_best = 0;
    } else {
      ++since_best;
    }
    if (e.log_probability > best_lp) {
      best_lp = e.log_probability;
      best_slots = slots;
      best_q = q;
    }
    // Exact E-steps increase the probability monotonically, so one flat
    // step means convergence. Sampled E-steps are noisy and get a patience
    // window instead.
    if (exact && it > 0 && e.log_probability - prev_lp < cfg.tolerance) {
      stalled = true;
      break;
    }
    if (!exact && since_best >= kSampledPatience) {
      stalled = true;
      break;
    }
    prev_lp = e.log_probability;

    // M-step.
    const double floor = 1e-12 / std::max<double>(1.0, static_cast<double>(k));
    double total = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
      slots[s] = std::max(e.slot_counts[s] / n, floor);
      total += slots[s];
    }
    q = cfg.q_enabled ? e.continuous_count / n : 0.0;
    total += q;
    for (double& v : slots) v /= total;
    q /= total;
  }
  if (!stalled) {
    const double lp = log_prob_of(slots, q);
    if (lp > best_lp) {
      best_lp = lp;
      best_slots = slots;
      best_q = q;
    }
  }

  PmlResult r;
  r.distribution = to_distribution(best_slots, best_q);
  if (dp_ok) {
    const auto p = pattern_prob(r.distribution, profile, work_cap);
    r.probability = p.value;
    r.log_probability = p.log_value;
  } else {
    r.log_probability = best_lp;
    r.probability = std::exp(best_lp);
  }
  r.method = PmlMethod::EmApprox;
  r.certificates = bounds_report(profile);
  r.converged = stalled && certificate_violations(r.certificates, r.distribution).empty();
  r.candidates_examined = tr.iterations_run;
  return r;
}

}  // namespace profilest
