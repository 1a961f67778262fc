#include <doctest.h>

#include <cmath>

#include "profilest/error.hpp"
#include "profilest/estimators.hpp"
#include "profilest/random.hpp"

using namespace profilest;

TEST_CASE("maximum likelihood distribution") {
  const auto d = ml_distribution(TokenSequence::from_whitespace("a b r a c a d a b r a"));
  REQUIRE(d.discrete_size() == 5);
  CHECK(d.atoms()[0] == doctest::Approx(5.0 / 11));
  CHECK(d.atoms()[4] == doctest::Approx(1.0 / 11));
  CHECK(d.is_discrete());
  CHECK_THROWS_AS(ml_distribution(TokenSequence{}), Error);
}

TEST_CASE("divergence, entropy and distance") {
  const Distribution a({0.5, 0.5}), b({0.75, 0.25});
  CHECK(kl_divergence(a, a) == 0.0);
  CHECK(kl_divergence(a, b) == doctest::Approx(0.5 * std::log2(0.5 / 0.75) + 0.5 * std::log2(0.5 / 0.25)));
  CHECK(std::isinf(kl_divergence(a, Distribution({1.0}))));
  CHECK(kl_divergence(Distribution({1.0}), a) == doctest::Approx(1.0));
  CHECK_THROWS_AS(kl_divergence(Distribution({0.5}), a), Error);
  CHECK(entropy(Distribution::uniform(8)) == doctest::Approx(3.0));
  CHECK(entropy(Distribution({1.0})) == 0.0);
  CHECK(l1_distance(a, b) == doctest::Approx(0.5));
  CHECK(l1_distance(Distribution({0.5}), Distribution()) == doctest::Approx(1.0));
}

TEST_CASE("Pinsker inequality on random pairs") {
  Rng rng(mix_seed(31, 0));
  for (int t = 0; t < 500; ++t) {
    const auto ka = 1 + rng.below(6), kb = 1 + rng.below(6);
    const Distribution a(rng.dirichlet1(ka)), b(rng.dirichlet1(kb));
    const double d = kl_divergence(a, b);
    const double l1 = l1_distance(a, b);
    CHECK(d >= 0.0);
    // D (in bits) >= l1^2 / (2 ln 2).
    CHECK(d + 1e-12 >= l1 * l1 / (2 * std::log(2.0)));
  }
}

TEST_CASE("expected new symbols") {
  const int n = 20;
  // n distinct tokens: ML puts all mass on them, PML is fully continuous.
  TokenSequence seq;
  for (int i = 0; i < n; ++i) seq.tokens.push_back("t" + std::to_string(i));
  CHECK(expected_new_symbols(ml_distribution(seq), n, 10 * n) == 0.0);
  CHECK(expected_new_symbols(Distribution(), n, 10 * n) == doctest::Approx(10.0 * n));
  CHECK(expected_new_symbols(Distribution::uniform(5), 3, 0) == 0.0);

  const Distribution d = Distribution::uniform(5);
  const double v = expected_new_symbols(d, 3, 1);
  CHECK(v >= 0.0);
  CHECK(v <= 1.0);
  CHECK(v == doctest::Approx(0.4));
  CHECK_THROWS_AS(expected_new_symbols(d, 3, -1), Error);

  // Monotone in t and in q.
  double prev = 0.0;
  for (int t = 0; t <= 50; ++t) {
    const double cur = expected_new_symbols(Distribution::mixed({0.3, 0.2, 0.1, 0.1}, 0.3), 2, t);
    CHECK(cur >= prev);
    prev = cur;
  }
  prev = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double q = i / 10.0;
    const std::vector<double> atoms = {(1 - q) * 0.6, (1 - q) * 0.4};
    const double cur = expected_new_symbols(Distribution::mixed(atoms, q), 2, 7);
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
}

TEST_CASE("alpha vectors") {
  const AlphaVector a({0.4, 0.6});
  CHECK(a.values()[0] == 0.6);
  CHECK(a.profile_at(10) == Profile::parse("4^1 6^1"));
  CHECK_THROWS_AS(a.profile_at(7), Error);
  CHECK_THROWS_AS(AlphaVector({0.5, 0.4}), Error);
  CHECK_THROWS_AS(AlphaVector({}), Error);
  CHECK_THROWS_AS(AlphaVector({1.0, 0.0}), Error);
}

TEST_CASE("convergence experiment trend") {
  const auto rows = convergence_experiment(AlphaVector({0.6, 0.4}), {10, 20, 50, 100});
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.kl_bits));
    CHECK(r.k_hat == 2);
    CHECK(r.q_hat == 0.0);
  }
  CHECK(rows.back().kl_bits < rows.front().kl_bits);
  CHECK(rows.back().kl_bits <= 0.02);
}
