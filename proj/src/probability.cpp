#include "profilest/probability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>

#include "profilest/error.hpp"

namespace profilest {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

double clamp_probability(double value) {
  if (value < 0.0) {
    if (value < -1e-12) throw Error(ErrorKind::Internal, "negative pattern probability");
    return 0.0;
  }
  if (value > 1.0) {
    if (value > 1.0 + 1e-12) throw Error(ErrorKind::Internal, "pattern probability above one");
    return 1.0;
  }
  return value;
}

// Dynamic program over atoms. A state records, for every distinct
// multiplicity, how many symbols of that multiplicity are still unplaced.
// Processing an atom either leaves it unused or places one still-unplaced
// symbol of multiplicity mu on it (weight: #choices * atom^mu). Whatever
// is left at the end must be singletons, each drawn from the continuous part.
class StateSpace {
 public:
  explicit StateSpace(const Profile& profile) {
    for (auto [mu, phi] : profile.prevalences()) {
      mu_.push_back(mu);
      phi_.push_back(phi);
    }
    const std::size_t c = mu_.size();
    stride_.assign(c, 1);
    std::uint64_t size = 1;
    for (std::size_t i = 0; i < c; ++i) {
      stride_[i] = static_cast<std::size_t>(size);
      size = sat_mul(size, static_cast<std::uint64_t>(phi_[i]) + 1);
    }
    size_ = size;
  }

  std::uint64_t size() const { return size_; }
  std::size_t classes() const { return mu_.size(); }

  void materialize() {
    const std::size_t c = mu_.size();
    const std::size_t s = static_cast<std::size_t>(size_);
    digits_.assign(s * c, 0);
    for (std::size_t idx = 0; idx < s; ++idx) {
      std::size_t rem = idx;
      for (std::size_t i = 0; i < c; ++i) {
        digits_[idx * c + i] = static_cast<int>(rem % static_cast<std::size_t>(phi_[i] + 1));
        rem /= static_cast<std::size_t>(phi_[i] + 1);
      }
    }
    full_ = 0;
    for (std::size_t i = 0; i < c; ++i) full_ += static_cast<std::size_t>(phi_[i]) * stride_[i];
    singleton_class_ = (c > 0 && mu_[0] == 1) ? 0 : -1;
  }

  int digit(std::size_t state, std::size_t cls) const { return digits_[state * mu_.size() + cls]; }
  std::size_t stride(std::size_t cls) const { return stride_[cls]; }
  int mu(std::size_t cls) const { return mu_[cls]; }
  int phi(std::size_t cls) const { return phi_[cls]; }
  std::size_t full() const { return full_; }

  // Number of singletons left if only singletons are left, else -1.
  int terminal_singletons(std::size_t state) const {
    int ones = 0;
    for (std::size_t i = 0; i < mu_.size(); ++i) {
      const int d = digit(state, i);
      if (static_cast<int>(i) == singleton_class_) {
        ones = d;
      } else if (d != 0) {
        return -1;
      }
    }
    return ones;
  }

 private:
  std::vector<int> mu_, phi_;
  std::vector<std::size_t> stride_;
  std::vector<int> digits_;
  std::uint64_t size_ = 1;
  std::size_t full_ = 0;
  int singleton_class_ = -1;
};

using Real = long double;

struct Table {
  std::vector<Real> v;
  double log_offset = 0.0;  // true table = exp(log_offset) * v
};

void renormalize(Table& t) {
  Real mx = 0;
  for (Real x : t.v) mx = std::max(mx, x);
  if (mx > 0) {
    for (Real& x : t.v) x /= mx;
    t.log_offset += static_cast<double>(std::log(mx));
  }
}

// powers[i] = x^{mu_i}
std::vector<Real> class_powers(const StateSpace& sp, Real x) {
  std::vector<Real> p(sp.classes());
  for (std::size_t i = 0; i < sp.classes(); ++i) p[i] = std::pow(x, sp.mu(i));
  return p;
}

Table forward_step(const StateSpace& sp, const Table& in, Real x) {
  const auto pw = class_powers(sp, x);
  Table out{in.v, in.log_offset};
  const std::size_t s = in.v.size();
  for (std::size_t t = 0; t < s; ++t) {
    Real acc = 0;
    for (std::size_t i = 0; i < sp.classes(); ++i) {
      const int d = sp.digit(t, i);
      if (d < sp.phi(i)) {
        acc += static_cast<Real>(d + 1) * pw[i] * in.v[t + sp.stride(i)];
      }
    }
    out.v[t] += acc;
  }
  renormalize(out);
  return out;
}

Table backward_step(const StateSpace& sp, const Table& in, Real x) {
  const auto pw = class_powers(sp, x);
  Table out{in.v, in.log_offset};
  const std::size_t s = in.v.size();
  for (std::size_t t = 0; t < s; ++t) {
    Real acc = 0;
    for (std::size_t i = 0; i < sp.classes(); ++i) {
      const int d = sp.digit(t, i);
      if (d > 0) acc += static_cast<Real>(d) * pw[i] * in.v[t - sp.stride(i)];
    }
    out.v[t] += acc;
  }
  renormalize(out);
  return out;
}

Table terminal_table(const StateSpace& sp, Real q) {
  Table t;
  t.v.assign(static_cast<std::size_t>(sp.size()), 0);
  for (std::size_t s = 0; s < t.v.size(); ++s) {
    const int ones = sp.terminal_singletons(s);
    if (ones >= 0) t.v[s] = std::pow(q, ones);
  }
  renormalize(t);
  return t;
}

double log_of(Real x) { return x > 0 ? static_cast<double>(std::log(x)) : kNegInf; }

struct Scaled {
  std::vector<Real> x;
  Real q = 0;
  double log_scale = 0.0;
  bool all_zero = false;
};

Scaled scale_inputs(std::span<const double> atoms, double q) {
  if (q < 0.0) throw Error(ErrorKind::InvalidDistribution, "negative continuous mass");
  double s = q;
  for (double a : atoms) {
    if (!(a >= 0.0)) throw Error(ErrorKind::InvalidDistribution, "negative or NaN atom");
    s = std::max(s, a);
  }
  Scaled out;
  if (s <= 0.0) {
    out.all_zero = true;
    return out;
  }
  out.log_scale = std::log(s);
  out.x.reserve(atoms.size());
  for (double a : atoms) out.x.push_back(static_cast<Real>(a) / s);
  out.q = static_cast<Real>(q) / s;
  return out;
}

void check_work(int k, const Profile& profile, std::uint64_t work_cap) {
  const auto work = exact_work(k, profile);
  if (work > work_cap) {
    throw Error(ErrorKind::ResourceLimit,
                "exact pattern probability needs " + std::to_string(work) +
                    " work units, cap is " + std::to_string(work_cap) +
                    " (raise PROFILEST_MAX_WORK to allow it)");
  }
}

}  // namespace

const char* to_string(ProbabilityMethod method) {
  switch (method) {
    case ProbabilityMethod::ExactSum: return "exact-sum";
    case ProbabilityMethod::UniformFastPath: return "uniform-fast-path";
    case ProbabilityMethod::BruteForceOracle: return "brute-force-oracle";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Distribution

Distribution::Distribution(std::vector<double> atoms) {
  double sum = 0.0;
  for (double a : atoms) {
    if (!(a >= 0.0) || a > 1.0 + kMassTolerance) {
      throw Error(ErrorKind::InvalidDistribution, "atom outside [0, 1]");
    }
    sum += a;
  }
  if (sum > 1.0 + kMassTolerance) {
    throw Error(ErrorKind::InvalidDistribution, "atoms sum to more than one");
  }
  std::erase_if(atoms, [](double a) { return a == 0.0; });
  for (double& a : atoms) a = std::min(a, 1.0);
  std::sort(atoms.begin(), atoms.end(), std::greater<>());
  atoms_ = std::move(atoms);
  q_ = std::clamp(1.0 - sum, 0.0, 1.0);
  // Mass lost to rounding is not a continuous part.
  if (q_ <= kMassTolerance && !atoms_.empty()) q_ = 0.0;
}

Distribution Distribution::mixed(std::vector<double> atoms, double q) {
  if (!(q >= 0.0) || q > 1.0) {
    throw Error(ErrorKind::InvalidDistribution, "continuous mass outside [0, 1]");
  }
  const double sum = std::accumulate(atoms.begin(), atoms.end(), 0.0);
  if (std::abs(sum + q - 1.0) > kMassTolerance) {
    throw Error(ErrorKind::InvalidDistribution, "atoms plus continuous mass must sum to one");
  }
  Distribution d(std::move(atoms));
  d.q_ = q;
  return d;
}

Distribution Distribution::uniform(int k) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "uniform distribution needs k >= 1");
  Distribution d(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
  d.q_ = 0.0;
  return d;
}

// ---------------------------------------------------------------------------

std::uint64_t default_work_cap() {
  static const std::uint64_t cap = [] {
    if (const char* env = std::getenv("PROFILEST_MAX_WORK")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
    }
    return std::uint64_t{200'000'000};
  }();
  return cap;
}

std::uint64_t exact_work(int k, const Profile& profile) {
  StateSpace sp(profile);
  return sat_mul(sat_mul(static_cast<std::uint64_t>(std::max(k, 1)), sp.size()),
                 std::max<std::uint64_t>(sp.classes(), 1));
}

std::uint64_t injection_count(int k, const Profile& profile) {
  std::uint64_t count = 1;
  for (int i = 0; i < profile.m(); ++i) {
    if (k - i <= 0) {
      count = 0;
      break;
    }
    count = sat_mul(count, static_cast<std::uint64_t>(k - i));
  }
  // Subsets of singletons that may go to the continuous part.
  for (int i = 0; i < profile.singletons(); ++i) count = sat_mul(count, 2);
  return count;
}

double pattern_log_prob_raw(std::span<const double> atoms, double q, const Profile& profile,
                            std::uint64_t work_cap) {
  if (profile.empty()) return 0.0;
  check_work(static_cast<int>(atoms.size()), profile, work_cap);
  const Scaled sc = scale_inputs(atoms, q);
  if (sc.all_zero) return kNegInf;
  StateSpace sp(profile);
  sp.materialize();
  Table f;
  f.v.assign(static_cast<std::size_t>(sp.size()), 0);
  f.v[sp.full()] = 1;
  for (Real x : sc.x) f = forward_step(sp, f, x);
  Real total = 0;
  for (std::size_t s = 0; s < f.v.size(); ++s) {
    const int ones = sp.terminal_singletons(s);
    if (ones >= 0 && f.v[s] > 0) total += f.v[s] * std::pow(sc.q, ones);
  }
  const double lv = log_of(total);
  if (lv == kNegInf) return kNegInf;
  return lv + f.log_offset + profile.n() * sc.log_scale;
}

ProbabilityGradient pattern_prob_gradient(std::span<const double> atoms, double q,
                                          const Profile& profile, std::uint64_t work_cap) {
  ProbabilityGradient g;
  const std::size_t k = atoms.size();
  if (profile.empty()) {
    g.d_log_atoms.assign(k, 0.0);
    return g;
  }
  check_work(static_cast<int>(2 * k + 1), profile, work_cap);
  const Scaled sc = scale_inputs(atoms, q);
  if (sc.all_zero) {
    g.log_value = kNegInf;
    return g;
  }
  StateSpace sp(profile);
  sp.materialize();
  const std::size_t ns = static_cast<std::size_t>(sp.size());

  std::vector<Table> fwd(k + 1);
  fwd[0].v.assign(ns, 0);
  fwd[0].v[sp.full()] = 1;
  for (std::size_t j = 0; j < k; ++j) fwd[j + 1] = forward_step(sp, fwd[j], sc.x[j]);

  std::vector<Table> bwd(k + 1);
  bwd[k] = terminal_table(sp, sc.q);
  for (std::size_t j = k; j-- > 0;) bwd[j] = backward_step(sp, bwd[j + 1], sc.x[j]);

  // value (scaled) = <fwd[k], terminal>
  Real total = 0;
  for (std::size_t s = 0; s < ns; ++s) total += fwd[k].v[s] * bwd[k].v[s];
  const double log_total = log_of(total) + fwd[k].log_offset + bwd[k].log_offset;
  if (log_total == kNegInf) {
    g.log_value = kNegInf;
    return g;
  }
  g.log_value = log_total + profile.n() * sc.log_scale;

  // d/dx_j: splice atom j between fwd[j] and bwd[j+1].
  g.d_log_atoms.assign(k, 0.0);
  const double inv_scale = std::exp(-sc.log_scale);
  for (std::size_t j = 0; j < k; ++j) {
    const Real x = sc.x[j];
    std::vector<Real> dpw(sp.classes());
    for (std::size_t i = 0; i < sp.classes(); ++i) {
      dpw[i] = static_cast<Real>(sp.mu(i)) * std::pow(x, sp.mu(i) - 1);
    }
    Real acc = 0;
    for (std::size_t t = 0; t < ns; ++t) {
      const Real b = bwd[j + 1].v[t];
      if (b == 0) continue;
      Real inner = 0;
      for (std::size_t i = 0; i < sp.classes(); ++i) {
        const int d = sp.digit(t, i);
        if (d < sp.phi(i)) {
          inner += static_cast<Real>(d + 1) * dpw[i] * fwd[j].v[t + sp.stride(i)];
        }
      }
      acc += inner * b;
    }
    const double log_d = log_of(acc) + fwd[j].log_offset + bwd[j + 1].log_offset;
    g.d_log_atoms[j] = log_d == kNegInf ? 0.0 : std::exp(log_d - log_total) * inv_scale;
  }

  // d/dq through the terminal weights q^{#singletons left}.
  Real accq = 0;
  for (std::size_t s = 0; s < ns; ++s) {
    const int ones = sp.terminal_singletons(s);
    if (ones >= 1) accq += fwd[k].v[s] * static_cast<Real>(ones) * std::pow(sc.q, ones - 1);
  }
  const double log_dq = log_of(accq) + fwd[k].log_offset;
  g.d_log_q = log_dq == kNegInf ? 0.0 : std::exp(log_dq - log_total) * inv_scale;
  return g;
}

PatternProbability pattern_prob_uniform(int k, int m, int n) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "uniform support size must be positive");
  if (m < 0 || n < 0 || m > n) {
    throw Error(ErrorKind::InvalidInput, "need 0 <= m <= n for a pattern of length n");
  }
  PatternProbability out;
  out.method = ProbabilityMethod::UniformFastPath;
  if (m > k) {
    out.value = 0.0;
    out.log_value = kNegInf;
    return out;
  }
  double lv = -n * std::log(static_cast<double>(k));
  for (int i = 0; i < m; ++i) lv += std::log(static_cast<double>(k - i));
  out.log_value = lv;
  out.value = clamp_probability(std::exp(lv));
  return out;
}

PatternProbability pattern_prob(const Distribution& d, const Profile& profile,
                                std::uint64_t work_cap) {
  const auto atoms = d.atoms();
  if (d.is_discrete() && !atoms.empty() && atoms.front() == atoms.back()) {
    return pattern_prob_uniform(d.discrete_size(), profile.m(), profile.n());
  }
  PatternProbability out;
  out.method = ProbabilityMethod::ExactSum;
  out.log_value = pattern_log_prob_raw(atoms, d.continuous_mass(), profile, work_cap);
  out.value = clamp_probability(std::exp(out.log_value));
  if (out.log_value > 0.0) out.log_value = 0.0;
  return out;
}

PatternProbability pattern_prob(const Distribution& d, const Pattern& pattern,
                                std::uint64_t work_cap) {
  return pattern_prob(d, profile_of(pattern), work_cap);
}

PatternProbability pattern_prob_oracle(const Distribution& d, const Pattern& pattern) {
  if (!d.is_discrete()) {
    throw Error(ErrorKind::NotApplicable, "brute-force oracle needs a discrete distribution");
  }
  const auto atoms = d.atoms();
  const int k = d.discrete_size();
  const int n = pattern.n();
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total = sat_mul(total, static_cast<std::uint64_t>(k));
  if (total > kOracleLimit) {
    throw Error(ErrorKind::ResourceLimit, "oracle would enumerate more than 1e7 sequences");
  }

  // Walk every sequence in [k]^n; a prefix whose relabelled form already
  // disagrees with the pattern cannot complete to a match.
  const auto& target = pattern.indices();
  std::vector<int> label_of_atom(static_cast<std::size_t>(k), 0);
  long double sum = 0;
  std::function<void(int, int, long double)> walk = [&](int pos, int labels, long double prob) {
    if (pos == n) {
      sum += prob;
      return;
    }
    for (int a = 0; a < k; ++a) {
      int& label = label_of_atom[static_cast<std::size_t>(a)];
      const bool fresh = label == 0;
      const int got = fresh ? labels + 1 : label;
      if (got != target[static_cast<std::size_t>(pos)]) continue;
      if (fresh) label = got;
      walk(pos + 1, fresh ? labels + 1 : labels, prob * atoms[static_cast<std::size_t>(a)]);
      if (fresh) label = 0;
    }
  };
  walk(0, 0, 1.0L);

  PatternProbability out;
  out.method = ProbabilityMethod::BruteForceOracle;
  out.value = clamp_probability(static_cast<double>(sum));
  out.log_value = out.value > 0 ? std::log(out.value) : kNegInf;
  return out;
}

}  // namespace profilest
