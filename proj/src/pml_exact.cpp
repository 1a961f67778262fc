#include "profilest/pml_exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "profilest/error.hpp"
#include "profilest/random.hpp"

namespace profilest {

const char* to_string(PmlMethod method) {
  switch (method) {
    case PmlMethod::Trivial: return "trivial";
    case PmlMethod::BinaryClosedForm: return "binary-closed-form";
    case PmlMethod::UniformProfile: return "uniform-profile";
    case PmlMethod::NumericSearch: return "numeric-search";
    case PmlMethod::EmApprox: return "em-approx";
  }
  return "unknown";
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kZeroAtom = 1e-10;
constexpr double kTieTolerance = 1e-9;

int count_distinct(std::span<const double> atoms) {
  int distinct = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i == 0 || std::abs(atoms[i] - atoms[i - 1]) > 1e-7 * std::max(atoms[i], 1e-12)) {
      ++distinct;
    }
  }
  return distinct;
}

PmlResult finish(const Profile& profile, Distribution d, PmlMethod method, bool converged,
                 std::int64_t examined, std::uint64_t work_cap) {
  PmlResult r;
  const auto prob = pattern_prob(d, profile, work_cap);
  r.distribution = std::move(d);
  r.probability = prob.value;
  r.log_probability = prob.log_value;
  r.method = method;
  r.certificates = bounds_report(profile);
  r.converged = converged;
  r.candidates_examined = examined;
  if (!is_trivial(profile)) {
    auto bad = certificate_violations(r.certificates, r.distribution);
    if (!bad.empty()) {
      throw Error(ErrorKind::Internal,
                  "result for " + profile.to_string() + " violates certificate: " + bad.front());
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Constrained ascent on the box-capped simplex {x >= 0, x <= upper, sum = 1}.

std::vector<double> project(std::span<const double> y, std::span<const double> upper) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) {
    lo = std::min(lo, y[i] - upper[i]);
    hi = std::max(hi, y[i]);
  }
  auto mass = [&](double tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::clamp(y[i] - tau, 0.0, upper[i]);
    return s;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass(mid) > 1.0) lo = mid; else hi = mid;
  }
  const double tau = 0.5 * (lo + hi);
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::clamp(y[i] - tau, 0.0, upper[i]);
  return x;
}

// Solves A z = b by Gaussian elimination with partial pivoting; false when
// singular.
bool solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n,
                 std::vector<double>& z) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    }
    if (std::abs(a[piv * n + col]) < 1e-300) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  z.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * z[c];
    z[r] = s / a[r * n + r];
  }
  return std::all_of(z.begin(), z.end(), [](double v) { return std::isfinite(v); });
}

class Objective {
 public:
  Objective(const Profile& profile, int k, bool with_q, std::uint64_t work_cap)
      : profile_(profile), k_(k), with_q_(with_q), work_cap_(work_cap) {}

  double value(std::span<const double> x) const {
    return pattern_log_prob_raw(x.first(static_cast<std::size_t>(k_)), q_of(x), profile_,
                                work_cap_);
  }

  // Gradient of log P in the optimizer's coordinates.
  std::vector<double> gradient(std::span<const double> x, double* log_value = nullptr) const {
    auto g = pattern_prob_gradient(x.first(static_cast<std::size_t>(k_)), q_of(x), profile_,
                                   work_cap_);
    if (log_value) *log_value = g.log_value;
    std::vector<double> out = std::move(g.d_log_atoms);
    out.resize(static_cast<std::size_t>(k_), 0.0);
    if (with_q_) out.push_back(g.d_log_q);
    return out;
  }

 private:
  double q_of(std::span<const double> x) const {
    return with_q_ ? x[static_cast<std::size_t>(k_)] : 0.0;
  }

  const Profile& profile_;
  int k_;
  bool with_q_;
  std::uint64_t work_cap_;
};

// Spread (max - min) of the log-gradient over interior coordinates.
double interior_spread(std::span<const double> x, std::span<const double> g,
                       std::span<const double> upper) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= kZeroAtom || x[i] >= upper[i] - kZeroAtom) continue;
    lo = std::min(lo, g[i]);
    hi = std::max(hi, g[i]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

struct AscentOutcome {
  std::vector<double> x;
  double log_value = kNegInf;
};

AscentOutcome projected_ascent(const Objective& obj, std::vector<double> x,
                               std::span<const double> upper, int max_iterations) {
  double fx = obj.value(x);
  for (int it = 0; it < max_iterations; ++it) {
    if (fx == kNegInf) break;
    const auto g = obj.gradient(x);
    bool moved = false;
    for (double step = 1.0; step > 1e-14; step *= 0.5) {
      std::vector<double> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + step * g[i];
      y = project(y, upper);
      const double fy = obj.value(y);
      if (fy > fx) {
        const double gain = fy - fx;
        x = std::move(y);
        fx = fy;
        moved = gain > 1e-15;
        break;
      }
    }
    if (!moved) break;
  }
  return {std::move(x), fx};
}

// Newton iterations on the face of the constraint set that contains x.
AscentOutcome newton_polish(const Objective& obj, std::vector<double> x, double fx,
                            std::span<const double> upper) {
  for (int it = 0; it < 60; ++it) {
    const auto g = obj.gradient(x);
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] > kZeroAtom && x[i] < upper[i] - kZeroAtom) act.push_back(i);
    }
    const std::size_t na = act.size();
    if (na < 2) break;
    const double spread0 = interior_spread(x, g, upper);
    if (spread0 < 1e-13) break;

    // Hessian of log P restricted to the active coordinates.
    std::vector<double> h(na * na, 0.0);
    for (std::size_t c = 0; c < na; ++c) {
      const std::size_t i = act[c];
      const double step = std::min(1e-6, 0.5 * x[i]);
      auto xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      const auto gp = obj.gradient(xp);
      const auto gm = obj.gradient(xm);
      for (std::size_t r = 0; r < na; ++r) h[r * na + c] = (gp[act[r]] - gm[act[r]]) / (2 * step);
    }
    for (std::size_t r = 0; r < na; ++r)
      for (std::size_t c = r + 1; c < na; ++c) {
        const double s = 0.5 * (h[r * na + c] + h[c * na + r]);
        h[r * na + c] = h[c * na + r] = s;
      }

    // KKT system for a step that keeps the active mass fixed.
    const std::size_t dim = na + 1;
    std::vector<double> kkt(dim * dim, 0.0), rhs(dim, 0.0);
    for (std::size_t r = 0; r < na; ++r) {
      for (std::size_t c = 0; c < na; ++c) kkt[r * dim + c] = h[r * na + c];
      kkt[r * dim + na] = 1.0;
      kkt[na * dim + r] = 1.0;
      rhs[r] = -g[act[r]];
    }
    std::vector<double> sol;
    std::vector<double> dir(na);
    double slope = 0.0;
    if (solve_dense(kkt, rhs, dim, sol)) {
      for (std::size_t r = 0; r < na; ++r) {
        dir[r] = sol[r];
        slope += g[act[r]] * sol[r];
      }
    }
    if (!(slope > 0.0)) {
      // Not an ascent direction: fall back to the reduced gradient.
      double mean = 0.0;
      for (std::size_t r = 0; r < na; ++r) mean += g[act[r]];
      mean /= static_cast<double>(na);
      for (std::size_t r = 0; r < na; ++r) dir[r] = (g[act[r]] - mean) * 1e-3;
    }
    double t_max = 1.0;
    for (std::size_t r = 0; r < na; ++r) {
      const std::size_t i = act[r];
      if (dir[r] < 0) t_max = std::min(t_max, -x[i] / dir[r]);
      if (dir[r] > 0) t_max = std::min(t_max, (upper[i] - x[i]) / dir[r]);
    }
    bool accepted = false;
    for (double t = t_max; t > 1e-12; t *= 0.5) {
      auto y = x;
      for (std::size_t r = 0; r < na; ++r) y[act[r]] = std::clamp(x[act[r]] + t * dir[r], 0.0, upper[act[r]]);
      double fy = kNegInf;
      const auto gy = obj.gradient(y, &fy);
      if (fy > fx || (fy >= fx - 1e-14 * std::max(1.0, std::abs(fx)) &&
                      interior_spread(y, gy, upper) < spread0)) {
        x = std::move(y);
        fx = fy;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return {std::move(x), fx};
}

struct Candidate {
  std::vector<double> atoms;  // nonincreasing, no zeros
  double q = 0.0;
  double log_value = kNegInf;
  int k() const { return static_cast<int>(atoms.size()); }
};

Candidate clean(std::span<const double> x, int k, bool with_q) {
  Candidate c;
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    const double a = x[static_cast<std::size_t>(j)];
    if (a > kZeroAtom) {
      c.atoms.push_back(a);
      total += a;
    }
  }
  c.q = with_q ? x[static_cast<std::size_t>(k)] : 0.0;
  if (c.q <= kZeroAtom) c.q = 0.0;
  total += c.q;
  for (double& a : c.atoms) a /= total;
  c.q /= total;
  std::sort(c.atoms.begin(), c.atoms.end(), std::greater<>());
  return c;
}

// Higher probability wins; within the tie tolerance the smaller support,
// then the lexicographically larger atom vector.
bool better(const Candidate& a, const Candidate& b) {
  if (b.log_value == kNegInf) return a.log_value != kNegInf;
  const double diff = a.log_value - b.log_value;
  if (diff > kTieTolerance) return true;
  if (diff < -kTieTolerance) return false;
  if (a.k() != b.k()) return a.k() < b.k();
  return std::lexicographical_compare(b.atoms.begin(), b.atoms.end(), a.atoms.begin(),
                                      a.atoms.end());
}

Distribution to_distribution(const Candidate& c) {
  const double mass = std::accumulate(c.atoms.begin(), c.atoms.end(), 0.0);
  if (c.q == 0.0) {
    auto atoms = c.atoms;
    for (double& a : atoms) a /= mass;
    return Distribution(std::move(atoms));
  }
  return Distribution::mixed(c.atoms, 1.0 - mass);
}

}  // namespace

std::vector<std::string> certificate_violations(const BoundsReport& report,
                                                const Distribution& d) {
  std::vector<std::string> bad;
  const bool discrete = d.is_discrete();
  const double support = discrete ? d.discrete_size() : kInfinity;
  if (support < std::ceil(report.support_lower - 1e-12)) {
    bad.push_back("support size " + std::to_string(d.discrete_size()) + " below lower bound");
  }
  if (report.support_upper && support > static_cast<double>(*report.support_upper)) {
    bad.push_back("support size above upper bound");
  }
  if (d.continuous_mass() > report.continuous_cap.value() + 1e-9) {
    bad.push_back("continuous mass above phi_1/n");
  }
  if (report.discrete_forced && !discrete) bad.push_back("continuous mass on a forced-discrete profile");
  if (count_distinct(d.atoms()) > report.distinct_values_cap) {
    bad.push_back("more distinct atom values than allowed");
  }
  return bad;
}

PmlResult pml_trivial(const Profile& profile) {
  const std::uint64_t cap = default_work_cap();
  if (is_trivial(profile)) {
    return finish(profile, Distribution(std::vector<double>{1.0}), PmlMethod::Trivial, true, 0, cap);
  }
  if (profile.m() == 1) {
    return finish(profile, Distribution(std::vector<double>{1.0}), PmlMethod::Trivial, true, 0, cap);
  }
  if (profile.mu_max() == 1) {
    return finish(profile, Distribution(), PmlMethod::Trivial, true, 0, cap);
  }
  throw Error(ErrorKind::NotApplicable,
              "profile " + profile.to_string() + " is neither constant nor all-distinct");
}

PmlResult pml_binary(int n0, int n1) {
  if (n0 < 1 || n1 < n0) throw Error(ErrorKind::InvalidInput, "binary profile needs 1 <= n0 <= n1");
  if (n1 < 2) {
    throw Error(ErrorKind::NotApplicable, "profile 1^2 is all-distinct; use pml_trivial");
  }
  const int n = n0 + n1;
  const Profile profile = Profile::from_multiplicities({n1, n0});
  const long d = n1 - n0;
  if (d * d <= n) {
    return finish(profile, Distribution(std::vector<double>{0.5, 0.5}),
                  PmlMethod::BinaryClosedForm, true, 0, default_work_cap());
  }
  // Unique root in (0, 1) of n0 p^{n-2n0+1} - (n-n0) p^{n-2n0} + (n-n0) p - n0.
  // The polynomial is -n0 at 0 and vanishes at 1 with slope n - d^2 < 0, so
  // it is positive just below 1.
  auto poly = [&](long double p) {
    const int e = n - 2 * n0;
    return n0 * std::pow(p, e + 1) - (n - n0) * std::pow(p, e) + (n - n0) * p - n0;
  };
  long double lo = 0.0L, hi = 0.5L;
  while (!(poly(hi) > 0)) {
    hi = 1.0L - (1.0L - hi) * 0.5L;
    if (1.0L - hi < 1e-18L) throw Error(ErrorKind::Internal, "binary root not bracketed");
  }
  for (int it = 0; it < 400; ++it) {
    const long double mid = 0.5L * (lo + hi);
    const long double v = poly(mid);
    if (std::abs(v) <= 1e-12L && hi - lo < 1e-15L) break;
    if (v > 0) hi = mid; else lo = mid;
  }
  const double p = static_cast<double>(0.5L * (lo + hi));
  return finish(profile, Distribution(std::vector<double>{1.0 / (1.0 + p), p / (1.0 + p)}),
                PmlMethod::BinaryClosedForm, true, 0, default_work_cap());
}

std::int64_t uniform_profile_support(int r, int m) {
  if (r < 2 || m < 1) throw Error(ErrorKind::InvalidInput, "uniform profile needs r >= 2, m >= 1");
  const double mr = static_cast<double>(m) * r;
  for (std::int64_t k = m; k <= 1'000'000'000; ++k) {
    const double kd = static_cast<double>(k);
    if (mr * std::log1p(1.0 / kd) + std::log1p(-m / (kd + 1.0)) > 0.0) return k;
  }
  throw Error(ErrorKind::Internal, "uniform profile support search ran past 1e9");
}

PmlResult pml_uniform_profile(int r, int m) {
  const auto k = uniform_profile_support(r, m);
  if (k > 100'000'000) throw Error(ErrorKind::ResourceLimit, "uniform support too large to materialize");
  const Profile profile(std::map<int, int>{{r, m}});
  PmlResult res;
  res.distribution = Distribution::uniform(static_cast<int>(k));
  const auto prob = pattern_prob_uniform(static_cast<int>(k), m, m * r);
  res.probability = prob.value;
  res.log_probability = prob.log_value;
  res.method = PmlMethod::UniformProfile;
  res.certificates = bounds_report(profile);
  res.converged = true;
  auto bad = certificate_violations(res.certificates, res.distribution);
  if (!bad.empty()) throw Error(ErrorKind::Internal, "uniform profile result: " + bad.front());
  return res;
}

double pml_uniform_ratio_limit(int r) {
  if (r < 2) throw Error(ErrorKind::InvalidInput, "ratio limit needs r >= 2");
  auto h = [r](double a) { return -a * std::log1p(-1.0 / a) - r; };
  double lo = 1.0, hi = 10.0;  // h(1+) = +inf, h(10) < 0 for r >= 2
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double stationarity_spread(const Distribution& d, const Profile& profile) {
  const auto g = pattern_prob_gradient(d.atoms(), d.continuous_mass(), profile);
  if (g.log_value == kNegInf || g.d_log_atoms.empty()) return 0.0;
  const double value = std::exp(g.log_value);
  const auto [lo, hi] = std::minmax_element(g.d_log_atoms.begin(), g.d_log_atoms.end());
  return (*hi - *lo) * value;
}

PmlResult pml_search(const Profile& profile, const SearchConfig& cfg) {
  if (cfg.starts < 1) throw Error(ErrorKind::InvalidInput, "starts must be >= 1");
  if (!(cfg.gradient_tolerance > 0)) throw Error(ErrorKind::InvalidInput, "gradient tolerance must be positive");

  if (!cfg.force_numeric) {
    if (is_trivial(profile) || profile.m() == 1 || profile.mu_max() == 1) return pml_trivial(profile);
    if (profile.m() == 2) {
      const auto mult = profile.multiplicities();
      return pml_binary(mult[1], mult[0]);
    }
    if (profile.prevalences().size() == 1) {
      return pml_uniform_profile(profile.mu_min(), profile.m());
    }
  }
  if (is_trivial(profile)) return pml_trivial(profile);

  const BoundsReport report = bounds_report(profile);
  const bool with_q = !report.discrete_forced;
  const int m = profile.m();
  const int min_k = with_q ? std::max(m - profile.singletons(), 0) : m;

  int lo = report.discrete_forced
               ? std::max(m, static_cast<int>(std::ceil(report.support_lower - 1e-12)))
               : min_k;
  int hi = 0;
  if (cfg.k_range_override) {
    lo = std::max(cfg.k_range_override->first, min_k);
    hi = cfg.k_range_override->second;
  } else if (report.support_upper) {
    hi = static_cast<int>(*report.support_upper);
  } else {
    throw Error(ErrorKind::UnboundedSearch,
                "profile " + profile.to_string() +
                    " has singletons, so its support size is unbounded; give an explicit k range");
  }
  if (hi < lo) throw Error(ErrorKind::InvalidInput, "empty k range for the search");

  const double q_cap = report.continuous_cap.value();
  Candidate best;
  std::int64_t examined = 0;

  for (int k = lo; k <= hi; ++k) {
    const std::size_t dim = static_cast<std::size_t>(k) + (with_q ? 1 : 0);
    if (dim == 0) continue;
    std::vector<double> upper(static_cast<std::size_t>(k), 1.0);
    if (with_q) upper.push_back(q_cap);
    double cap_sum = std::accumulate(upper.begin(), upper.end(), 0.0);
    if (cap_sum < 1.0 - 1e-12) continue;  // no feasible point
    if (exact_work(static_cast<int>(2 * k + 1), profile) > cfg.work_cap) {
      throw Error(ErrorKind::ResourceLimit,
                  "search at k = " + std::to_string(k) + " exceeds the work cap");
    }
    const Objective obj(profile, k, with_q, cfg.work_cap);

    std::vector<std::vector<double>> starts;
    if (k > 0) {
      std::vector<double> uni(dim, 0.0);
      for (int j = 0; j < k; ++j) uni[static_cast<std::size_t>(j)] = 1.0 / k;
      starts.push_back(project(uni, upper));

      // Empirical frequencies, padded with small atoms when k > m.
      const auto mult = profile.multiplicities();
      std::vector<double> ml(dim, 0.0);
      for (int j = 0; j < k; ++j) {
        ml[static_cast<std::size_t>(j)] =
            j < m ? static_cast<double>(mult[static_cast<std::size_t>(j)]) / profile.n()
                  : 1.0 / (static_cast<double>(profile.n()) * k);
      }
      double s = std::accumulate(ml.begin(), ml.end(), 0.0);
      for (double& v : ml) v /= s;
      starts.push_back(project(ml, upper));
    }
    for (int sidx = 0; sidx < cfg.starts; ++sidx) {
      Rng rng(mix_seed(cfg.seed, (static_cast<std::uint64_t>(k) << 32) | static_cast<std::uint64_t>(sidx)));
      const double q = with_q ? rng.uniform() * q_cap : 0.0;
      auto w = rng.dirichlet1(static_cast<std::size_t>(k));
      std::vector<double> x(dim, 0.0);
      for (int j = 0; j < k; ++j) x[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j)] * (1.0 - q);
      if (with_q) x[static_cast<std::size_t>(k)] = q;
      starts.push_back(project(x, upper));
    }

    for (auto& x0 : starts) {
      ++examined;
      auto asc = projected_ascent(obj, std::move(x0), upper, cfg.max_iterations);
      if (asc.log_value == kNegInf) continue;
      asc = newton_polish(obj, std::move(asc.x), asc.log_value, upper);
      Candidate c = clean(asc.x, k, with_q);
      if (c.atoms.empty() && c.q == 0.0) continue;
      c.log_value = pattern_log_prob_raw(c.atoms, c.q, profile, cfg.work_cap);
      if (c.log_value == kNegInf) continue;
      if (!certificate_violations(report, to_distribution(c)).empty()) continue;
      if (better(c, best)) best = std::move(c);
    }
  }
  if (best.log_value == kNegInf) {
    throw Error(ErrorKind::Infeasible, "no feasible distribution in the searched k range");
  }

  Distribution d = to_distribution(best);
  const double spread = stationarity_spread(d, profile);
  const bool converged = spread <= cfg.gradient_tolerance &&
                         count_distinct(d.atoms()) <= report.distinct_values_cap;
  return finish(profile, std::move(d), PmlMethod::NumericSearch, converged, examined, cfg.work_cap);
}

// ---------------------------------------------------------------------------

std::vector<Table1Row> reproduce_table1(std::uint64_t seed) {
  struct Spec {
    const char* profile;
    const char* expected;
    std::vector<double> atoms;
    bool continuous;
  };
  const std::vector<Spec> specs = {
      {"1^1", "any distribution", {1.0}, false},
      {"2^1", "(1)", {1.0}, false},
      {"3^1", "(1)", {1.0}, false},
      {"4^1", "(1)", {1.0}, false},
      {"1^2", "()", {}, true},
      {"1^3", "()", {}, true},
      {"1^4", "()", {}, true},
      {"2^1 1^1", "(1/2, 1/2)", {0.5, 0.5}, false},
      {"3^1 1^1", "(1/2, 1/2)", {0.5, 0.5}, false},
      {"2^2", "(1/2, 1/2)", {0.5, 0.5}, false},
      {"2^1 1^2", "(1/5, 1/5, 1/5, 1/5, 1/5)", {0.2, 0.2, 0.2, 0.2, 0.2}, false},
  };
  std::vector<Table1Row> rows;
  for (const auto& s : specs) {
    Table1Row row;
    row.profile = Profile::parse(s.profile);
    row.canonical = canonical_pattern(row.profile);
    row.expected = s.expected;
    row.expected_distribution = s.continuous ? Distribution() : Distribution(s.atoms);
    row.expected_probability = pattern_prob(row.expected_distribution, row.profile).value;

    SearchConfig cfg;
    cfg.seed = seed;
    if (!is_trivial(row.profile) && row.profile.mu_min() == 1) cfg.k_range_override = std::pair{1, 8};
    row.computed = pml_search(row.profile, cfg);

    bool ok = std::abs(row.computed.probability - row.expected_probability) <= 1e-6;
    if (!is_trivial(row.profile)) {
      const auto got = row.computed.distribution.atoms();
      const auto want = row.expected_distribution.atoms();
      ok = ok && got.size() == want.size() &&
           std::abs(row.computed.distribution.continuous_mass() -
                    row.expected_distribution.continuous_mass()) <= 1e-4;
      for (std::size_t i = 0; ok && i < got.size(); ++i) ok = std::abs(got[i] - want[i]) <= 1e-4;
    }
    row.match = ok;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace profilest
