#include <doctest.h>

#include <random>

#include "paternalism/errors.hpp"
#include "paternalism/welfare.hpp"

using namespace paternalism;

namespace {

PopulationState random_population(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pi = u(rng);
  return {pi, pi * u(rng), (1.0 - pi) * u(rng)};
}

}  // namespace

TEST_CASE("imposed welfare examples") {
  CHECK(welfare_imposed(CAProfile{OptionId::One, 1.0}, 0.3, OptionId::One) == doctest::Approx(1.0));
  CHECK(welfare_imposed(CAProfile{OptionId::One, 0.0}, 0.3, OptionId::Two) == doctest::Approx(0.7));
  CHECK(welfare_imposed(CAProfile{OptionId::One, 0.3}, 0.6, OptionId::One) == doctest::Approx(0.72));
  CHECK_THROWS_AS(welfare_imposed(CAProfile{OptionId::One, 1.2}, 0.3, OptionId::One), DomainError);
  CHECK_THROWS_AS(welfare_imposed(CAProfile{OptionId::One, 0.2}, -0.1, OptionId::One), DomainError);
}

TEST_CASE("freedom welfare examples") {
  CHECK(welfare_freedom(CAProfile{OptionId::One, 0.0}, PopulationState{0.4, 0, 0}) == doctest::Approx(1.0));
  CHECK(welfare_freedom(CAProfile{OptionId::One, 0.5}, PopulationState{0.6, 0, 0}) == doctest::Approx(0.8));
  CHECK(welfare_freedom(CAProfile{OptionId::One, 0.5}, PopulationState{0.6, 0.1, 0.1}) == doctest::Approx(0.7));
  CHECK_THROWS_AS(welfare_freedom(CAProfile{OptionId::One, 0.5}, PopulationState{0.2, 0.3, 0.0}), DomainError);
  CHECK_THROWS_AS(welfare_freedom(CAProfile{OptionId::One, 0.5}, PopulationState{0.9, 0.0, 0.2}), DomainError);
}

TEST_CASE("freedom delta examples") {
  const CAProfile half{OptionId::One, 0.5};
  CHECK(freedom_delta(half, PopulationState{0.5, 0.0, 0.2}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(freedom_delta(CAProfile{OptionId::One, 0.25}, PopulationState{0.5, 0.05, 0.1}) == doctest::Approx(-0.10));
  CHECK(freedom_delta(CAProfile{OptionId::One, 0.8}, PopulationState{0.5, 0.0, 0.1}) == doctest::Approx(0.06));
}

TEST_CASE("optimal policy examples") {
  auto d = optimal_policy(CAProfile{OptionId::One, 0.6}, PopulationState{0.5, 0, 0});
  CHECK(d.choice == Alternative::ImposeOne);
  d = optimal_policy(CAProfile{OptionId::One, 0.4}, PopulationState{0.5, 0, 0});
  CHECK(d.choice == Alternative::LaissezFaire);
  d = optimal_policy(CAProfile{OptionId::One, 0.1}, PopulationState{0.05, 0, 0});
  CHECK(d.choice == Alternative::LaissezFaire);
  CHECK(d.ranking[1] == Alternative::ImposeTwo);
  CHECK(d.ranking[2] == Alternative::ImposeOne);
}

TEST_CASE("ties at phi = 1/2 go to laissez-faire") {
  for (double pi : {0.0, 0.3, 0.5, 0.9, 1.0}) {
    const auto d = optimal_policy(CAProfile{OptionId::One, 0.5}, PopulationState{pi, 0, 0});
    CHECK(d.choice == Alternative::LaissezFaire);
    CHECK(d.ranking[0] == Alternative::LaissezFaire);
  }
  // phi = 1, pi = 1: all three alternatives are worth 1.
  const auto d = optimal_policy(CAProfile{OptionId::Two, 1.0}, PopulationState{0.0, 0, 0});
  CHECK(d.ranking[0] == Alternative::LaissezFaire);
  CHECK(d.ranking[1] == Alternative::ImposeTwo);
}

TEST_CASE("boundary q") {
  CHECK(*boundary_q(0.0) == doctest::Approx(0.5));
  CHECK(*boundary_q(0.25) == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(boundary_q(0.5).has_value());
  CHECK_FALSE(boundary_q(0.9).has_value());
}

TEST_CASE("mistakes benefit CA") {
  CHECK(mistakes_benefit_ca(CAProfile{OptionId::One, 0.3}, BeliefSet{0.5, 0.7}));
  CHECK_FALSE(mistakes_benefit_ca(CAProfile{OptionId::Two, 0.3}, BeliefSet{0.5, 0.7}));
  CHECK_FALSE(mistakes_benefit_ca(CAProfile{OptionId::One, 0.3}, BeliefSet{0.5, 0.5}));
  CHECK(mistakes_benefit_ca(CAProfile{OptionId::Two, 0.3}, BeliefSet{0.5, 0.2}));
}

TEST_CASE("welfare stays in the unit interval") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const CAProfile ca{u(rng) < 0.5 ? OptionId::One : OptionId::Two, u(rng)};
    const auto pop = random_population(rng);
    const double q = u(rng);
    for (double w : {welfare_imposed(ca, q, OptionId::One), welfare_imposed(ca, q, OptionId::Two),
                     welfare_freedom(ca, pop)}) {
      REQUIRE(w >= -1e-15);
      REQUIRE(w <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("mixture equals closed form") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const CAProfile ca{u(rng) < 0.5 ? OptionId::One : OptionId::Two, u(rng)};
    const auto pop = random_population(rng);
    worst = std::max(worst, std::abs(welfare_freedom(ca, pop) - welfare_freedom_closed(ca, pop)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("delta formula and its slope in eps_x") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const CAProfile ca{OptionId::One, u(rng)};
    const auto pop = random_population(rng);
    const double expected = -pop.eps_x - pop.eps_y * (1.0 - 2.0 * ca.phi);
    REQUIRE(std::abs(freedom_delta(ca, pop) - expected) <= 1e-12);
    if (ca.phi <= 0.5) REQUIRE(freedom_delta(ca, pop) <= 1e-15);
  }
  for (int i = 0; i < 200; ++i) {
    const CAProfile ca{OptionId::One, u(rng)};
    const double pi = 0.2 + 0.6 * u(rng);
    const PopulationState pop{pi, 0.1 * u(rng) + 0.01, 0.1 * u(rng)};
    const double h = 1e-6;
    auto shifted = pop;
    auto back = pop;
    shifted.eps_x += h;
    back.eps_x -= h;
    const double slope = (freedom_delta(ca, shifted) - freedom_delta(ca, back)) / (2 * h);
    REQUIRE(slope == doctest::Approx(-1.0).epsilon(1e-8));
  }
}

TEST_CASE("monotone in the belief share") {
  for (double phi : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    const CAProfile ca{OptionId::One, phi};
    double prev_imp = -1.0, prev_free = -1.0;
    for (int i = 0; i <= 100; ++i) {
      const double q = i / 100.0;
      const double imp = welfare_imposed(ca, q, OptionId::One);
      const double fr = welfare_freedom(ca, PopulationState{q, 0, 0});
      CHECK(imp >= prev_imp - 1e-15);
      CHECK(fr >= prev_free - 1e-15);
      prev_imp = imp;
      prev_free = fr;
    }
  }
}

TEST_CASE("relabelling options leaves welfare unchanged") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const CAProfile ca{u(rng) < 0.5 ? OptionId::One : OptionId::Two, u(rng)};
    const CAProfile flipped{complement(ca.preferred), ca.phi};
    const auto pop = random_population(rng);
    const auto mirror = pop.mirrored();
    REQUIRE(welfare_freedom(ca, pop) == doctest::Approx(welfare_freedom(flipped, mirror)).epsilon(1e-12));
    REQUIRE(welfare_imposed(ca, pop.pi, OptionId::One) ==
            doctest::Approx(welfare_imposed(flipped, mirror.pi, OptionId::Two)).epsilon(1e-12));
  }
}

TEST_CASE("without mistakes a CA imposes only its own option, only above phi = 1/2") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const CAProfile ca{u(rng) < 0.5 ? OptionId::One : OptionId::Two, u(rng)};
    const auto d = optimal_policy(ca, PopulationState{u(rng), 0, 0});
    REQUIRE(d.choice != impose(complement(ca.preferred)));
    REQUIRE((d.choice == impose(ca.preferred)) == (ca.phi > 0.5));
  }
}

TEST_CASE("intensive ranking unaffected by mistakes") {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const CAProfile ca{OptionId::One, u(rng)};
    const double q = u(rng);
    const auto clean = optimal_policy(ca, q, PopulationState{q, 0, 0});
    const auto noisy = optimal_policy(ca, q, PopulationState{q, q * u(rng), (1 - q) * u(rng)});
    const double gap_clean = clean.welfare_of(Alternative::ImposeOne) - clean.welfare_of(Alternative::ImposeTwo);
    const double gap_noisy = noisy.welfare_of(Alternative::ImposeOne) - noisy.welfare_of(Alternative::ImposeTwo);
    REQUIRE(gap_clean == gap_noisy);
  }
}
