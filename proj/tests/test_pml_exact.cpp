#include <doctest.h>

#include <cmath>

#include "profilest/error.hpp"
#include "profilest/pml_exact.hpp"
#include "profilest/random.hpp"
#include "profilest/serialize.hpp"
#include "support.hpp"

using namespace profilest;
using profilest::testing::exhaustive_pml;

namespace {

Profile P(const char* text) { return Profile::parse(text); }

SearchConfig with_range(int lo, int hi) {
  SearchConfig cfg;
  cfg.k_range_override = std::pair{lo, hi};
  return cfg;
}

double binomial_best_on_grid(int n0, int n1) {
  // max over p in [1/2, 1) of p^n1 (1-p)^n0 + p^n0 (1-p)^n1: a 2000-point grid
  // followed by golden-section refinement around the best grid point.
  auto f = [&](double p) { return std::pow(p, n1) * std::pow(1 - p, n0) + std::pow(p, n0) * std::pow(1 - p, n1); };
  double best_p = 0.5, best = f(0.5);
  for (int i = 0; i <= 2000; ++i) {
    const double p = 0.5 + 0.5 * i / 2000.0 * (1 - 1e-9);
    if (f(p) > best) best = f(p), best_p = p;
  }
  double a = std::max(0.5, best_p - 0.5 / 2000), b = std::min(1.0, best_p + 0.5 / 2000);
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) > f(d)) b = d; else a = c;
  }
  return std::max(best, f(0.5 * (a + b)));
}

}  // namespace

TEST_CASE("trivial closed forms") {
  CHECK(pml_trivial(P("7^1")).distribution.atoms().size() == 1);
  CHECK(pml_trivial(P("7^1")).probability == 1.0);
  const auto distinct = pml_trivial(P("1^100"));
  CHECK(distinct.distribution.continuous_mass() == 1.0);
  CHECK(distinct.probability == 1.0);
  CHECK(pml_trivial(P("1^1")).probability == 1.0);
  CHECK_THROWS_AS(pml_trivial(P("1^1 2^1")), Error);
}

TEST_CASE("binary closed form") {
  const auto r = pml_binary(1, 2);
  CHECK(r.distribution.atoms()[0] == doctest::Approx(0.5));
  CHECK(r.probability == doctest::Approx(0.25));
  CHECK(r.method == PmlMethod::BinaryClosedForm);

  // Outside the (n1 - n0)^2 <= n regime the answer is skewed and matches a
  // direct one-dimensional maximization.
  const auto s = pml_binary(1, 4);
  CHECK(s.distribution.atoms()[0] > 0.5);
  CHECK(s.probability == doctest::Approx(binomial_best_on_grid(1, 4)).epsilon(1e-9));
  CHECK_THROWS_AS(pml_binary(3, 2), Error);
  CHECK_THROWS_AS(pml_binary(1, 1), Error);
}

TEST_CASE("binary regime boundary over n <= 12") {
  for (int n = 3; n <= 12; ++n) {
    for (int n0 = 1; 2 * n0 <= n; ++n0) {
      const int n1 = n - n0;
      const auto r = pml_binary(n0, n1);
      CHECK(r.probability == doctest::Approx(binomial_best_on_grid(n0, n1)).epsilon(1e-9));
      if ((n1 - n0) * (n1 - n0) <= n) {
        CHECK(r.distribution.atoms()[0] == 0.5);
        CHECK(r.probability == doctest::Approx(std::ldexp(1.0, -(n - 1))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("uniform profiles") {
  CHECK(uniform_profile_support(2, 10) == 12);
  CHECK(uniform_profile_support(3, 4) == 4);
  CHECK(uniform_profile_support(4, 3) == 3);
  const auto r = pml_uniform_profile(2, 10);
  CHECK(r.distribution.discrete_size() == 12);
  CHECK(r.probability == doctest::Approx(pattern_prob_uniform(12, 10, 20).value).epsilon(1e-12));
  for (int k : {10, 11, 13, 14}) CHECK(r.probability > pattern_prob_uniform(k, 10, 20).value);
  CHECK_THROWS_AS(uniform_profile_support(1, 5), Error);
}

TEST_CASE("uniform ratio limit") {
  const double a = pml_uniform_ratio_limit(2);
  CHECK(-a * std::log(1 - 1 / a) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(a > 1.0);
  CHECK(pml_uniform_ratio_limit(3) < a);
}

TEST_CASE("numeric search finds the uniform distribution over five for 1^2 2^1") {
  const auto r = pml_search(P("2^1 1^2"), with_range(1, 10));
  CHECK(r.method == PmlMethod::NumericSearch);
  CHECK(r.converged);
  CHECK(r.distribution.discrete_size() == 5);
  CHECK(r.distribution.continuous_mass() == 0.0);
  for (double a : r.distribution.atoms()) CHECK(a == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(r.probability == doctest::Approx(0.096).epsilon(1e-6));
}

TEST_CASE("search dispatch and errors") {
  CHECK(pml_search(P("2^10")).distribution.discrete_size() == 12);
  CHECK(pml_search(P("1^100")).distribution.continuous_mass() == 1.0);
  CHECK(pml_search(P("1^1 2^1")).method == PmlMethod::BinaryClosedForm);
  try {
    pml_search(P("1^1 2^2"));
    FAIL("expected an unbounded-search error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnboundedSearch);
  }
  SearchConfig bad;
  bad.starts = 0;
  CHECK_THROWS_AS(pml_search(P("2^3"), bad), Error);
}

TEST_CASE("closed-form agreement with forced numeric search") {
  SearchConfig cfg;
  cfg.force_numeric = true;
  cfg.starts = 8;
  for (int n = 3; n <= 12; ++n) {
    for (int n0 = 1; 2 * n0 <= n; ++n0) {
      const Profile f = Profile::from_multiplicities({n - n0, n0});
      SearchConfig c = cfg;
      if (n0 == 1) c.k_range_override = std::pair{1, 6};
      const auto num = pml_search(f, c);
      const auto closed = pml_binary(n0, n - n0);
      CHECK(num.probability == doctest::Approx(closed.probability).epsilon(1e-6));
    }
  }
  for (int r : {2, 3}) {
    for (int m = 1; m <= 4; ++m) {
      const Profile f(std::map<int, int>{{r, m}});
      const auto num = pml_search(f, cfg);
      const auto closed = pml_uniform_profile(r, m);
      CHECK(num.probability == doctest::Approx(closed.probability).epsilon(1e-6));
      CHECK(num.distribution.discrete_size() == closed.distribution.discrete_size());
    }
  }
}

TEST_CASE("dominance, certificates and stationarity on all profiles n <= 8") {
  Rng rng(mix_seed(21, 0));
  for (int n = 2; n <= 8; ++n) {
    for (const auto& f : profiles_of_length(n)) {
      int k_searched = 0;
      const PmlResult r = exhaustive_pml(f, {}, &k_searched);
      CAPTURE(f.to_string());
      CHECK(certificate_violations(r.certificates, r.distribution).empty());
      CHECK(r.probability == doctest::Approx(pattern_prob(r.distribution, f).value).epsilon(1e-12));

      const BoundsReport rep = bounds_report(f);
      const int kmax = std::max(1, k_searched);
      for (int t = 0; t < 200; ++t) {
        const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(kmax)));
        auto w = rng.dirichlet1(static_cast<std::size_t>(k));
        Distribution d(w);
        if (!rep.discrete_forced && rng.below(2) == 0) {
          const double q = rng.uniform();
          for (double& x : w) x *= 1 - q;
          d = Distribution::mixed(w, q);
        }
        const double v = pattern_prob(d, f).value;
        if (v > r.probability + 1e-9) FAIL("dominated by a random distribution: " << v << " > " << r.probability);
      }

      if (r.method == PmlMethod::NumericSearch && r.converged) {
        CHECK(stationarity_spread(r.distribution, f) <= SearchConfig{}.gradient_tolerance);
        // Analytic partials against central differences.
        const auto atoms = r.distribution.atoms();
        const double q = r.distribution.continuous_mass();
        const auto g = pattern_prob_gradient(atoms, q, f);
        const double value = std::exp(g.log_value);
        const double h = 1e-6;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
          std::vector<double> up(atoms.begin(), atoms.end()), dn = up;
          up[j] += h;
          dn[j] -= h;
          const double fd = (std::exp(pattern_log_prob_raw(up, q, f)) - std::exp(pattern_log_prob_raw(dn, q, f))) / (2 * h);
          CHECK(g.d_log_atoms[j] * value == doctest::Approx(fd).epsilon(1e-4));
        }
      }
    }
  }
}

TEST_CASE("more starts never lower the result") {
  for (const char* text : {"1^2 2^1 3^1", "1^1 2^1 4^1", "2^2 3^1"}) {
    SearchConfig few = with_range(1, 10), many = with_range(1, 10);
    few.starts = 2;
    many.starts = 12;
    if (Profile::parse(text).mu_min() > 1) few.k_range_override = many.k_range_override = std::nullopt;
    few.force_numeric = many.force_numeric = true;
    CHECK(pml_search(P(text), many).log_probability >= pml_search(P(text), few).log_probability - 1e-12);
  }
}

TEST_CASE("search is deterministic for a fixed seed") {
  SearchConfig cfg = with_range(1, 8);
  cfg.seed = 5;
  const auto a = to_json(pml_search(P("1^2 2^1 3^1"), cfg)).dump();
  const auto b = to_json(pml_search(P("1^2 2^1 3^1"), cfg)).dump();
  CHECK(a == b);
}

TEST_CASE("table of profiles of length at most four") {
  const auto rows = reproduce_table1();
  CHECK(rows.size() == 11);
  for (const auto& row : rows) {
    CAPTURE(row.profile.to_string());
    CHECK(row.match);
  }
}
