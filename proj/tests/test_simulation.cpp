#include <doctest.h>

#include <cmath>
#include <sstream>

#include "paternalism/errors.hpp"
#include "paternalism/random_utility.hpp"
#include "paternalism/simulation.hpp"

using namespace paternalism;

namespace {

SimConfig small_config() {
  SimConfig cfg;
  cfg.n_choosers = 2000;
  cfg.n_cas = 60;
  cfg.seed = 17;
  return cfg;
}

std::string dump(const SimPanel& panel) {
  std::ostringstream out;
  write_cas_csv(out, panel);
  write_choosers_csv(out, panel);
  return out.str();
}

}  // namespace

TEST_CASE("exact knowledge produces no mistakes") {
  const auto cfg = small_config();
  const auto c = simulate_choosers(cfg, Knowledge::exact(), SeedStream(cfg.seed));
  CHECK(c.population.eps_x == 0.0);
  CHECK(c.population.eps_y == 0.0);
  for (const auto& r : c.records) {
    CHECK(r.choice == r.true_pref);
    CHECK_FALSE(r.n_observed.has_value());
  }
}

TEST_CASE("risk-neutral lottery-preferrers err at the binomial rate") {
  SimConfig cfg;
  cfg.n_choosers = 10000;
  cfg.true_pi = 0.0;
  cfg.lottery_threshold = Distribution::point(0.25);
  const auto c = simulate_choosers(cfg, Knowledge::draws(5), SeedStream(5));
  CHECK(std::abs(c.population.eps_y - 0.67232) <= 0.02);
}

TEST_CASE("no Two-preferrers means no eps_y") {
  auto cfg = small_config();
  cfg.true_pi = 1.0;
  for (const auto& k : cfg.k_grid) CHECK(simulate_choosers(cfg, k, SeedStream(1)).population.eps_y == 0.0);
}

TEST_CASE("consensus bias") {
  auto cfg = small_config();
  for (const auto& ca : simulate_cas(cfg, SeedStream(2))) CHECK(ca.pi_belief == cfg.true_pi);
  cfg.true_pi = 0.6;
  cfg.consensus_bias = 0.2;
  for (const auto& ca : simulate_cas(cfg, SeedStream(2)))
    CHECK(ca.pi_belief == doctest::Approx(ca.profile.preferred == OptionId::One ? 0.8 : 0.4));
  cfg.consensus_bias = 0.9;
  for (const auto& ca : simulate_cas(cfg, SeedStream(2)))
    if (ca.profile.preferred == OptionId::One) CHECK(ca.pi_belief == 1.0);
}

TEST_CASE("self-regarding CAs never intervene without mistakes") {
  auto cfg = small_config();
  cfg.phi = Distribution::point(0.0);
  cfg.k_grid = {Knowledge::exact()};
  const auto panel = run_experiment(cfg);
  for (const auto& r : panel.cas) CHECK_FALSE(r.intervened);
}

TEST_CASE("strongly self-interested CAs always impose their own option") {
  auto cfg = small_config();
  cfg.phi = Distribution::point(0.75);
  const auto panel = run_experiment(cfg);
  for (const auto& r : panel.cas) {
    REQUIRE(r.intervened);
    CHECK(*r.imposed == r.ca_pref);
  }
}

TEST_CASE("panel consistency") {
  auto cfg = small_config();
  cfg.consensus_bias = 0.15;
  const auto panel = run_experiment(cfg);
  CHECK(panel.cas.size() == static_cast<std::size_t>(cfg.n_cas) * cfg.k_grid.size());
  CHECK(panel.choosers.size() == static_cast<std::size_t>(cfg.n_choosers) * cfg.k_grid.size());
  for (const auto& r : panel.cas) CHECK(r.imposed.has_value() == r.intervened);
  for (const auto& pop : panel.populations) CHECK_NOTHROW(validate(pop));
  // Without decision noise nobody imposes the option they do not prefer.
  for (const auto& r : panel.cas)
    if (r.intervened) CHECK(*r.imposed == r.ca_pref);
}

TEST_CASE("runs are deterministic and streams are independent of cohort size") {
  const auto cfg = small_config();
  CHECK(dump(run_experiment(cfg)) == dump(run_experiment(cfg)));

  auto bigger = cfg;
  bigger.n_cas = cfg.n_cas + 10;
  const auto a = simulate_cas(cfg, SeedStream(cfg.seed));
  const auto b = simulate_cas(bigger, SeedStream(cfg.seed));
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].profile.phi == b[i].profile.phi);
    CHECK(a[i].profile.preferred == b[i].profile.preferred);
  }
  auto other = cfg;
  other.seed = cfg.seed + 1;
  CHECK(dump(run_experiment(cfg)) != dump(run_experiment(other)));
}

TEST_CASE("Chooser preferences persist across k") {
  const auto cfg = small_config();
  const auto panel = run_experiment(cfg);
  const auto n = static_cast<std::size_t>(cfg.n_choosers);
  for (std::size_t g = 1; g < cfg.k_grid.size(); ++g)
    for (std::size_t i = 0; i < n; i += 97) CHECK(panel.choosers[g * n + i].true_pref == panel.choosers[i].true_pref);
}

TEST_CASE("exact rate is below the k = 0 rate") {
  double k0 = 0.0, exact = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto cfg = small_config();
    cfg.seed = seed;
    const auto curve = intervention_rate_curve(run_experiment(cfg));
    k0 += curve.front().rate;
    exact += curve.back().rate;
  }
  CHECK(exact < k0);
}

TEST_CASE("rate curve") {
  auto cfg = small_config();
  cfg.phi = Distribution::point(0.0);
  cfg.k_grid = {Knowledge::exact()};
  const auto curve = intervention_rate_curve(run_experiment(cfg));
  REQUIRE(curve.size() == 1);
  CHECK(curve[0].rate == 0.0);
  CHECK(curve[0].ci_lo == 0.0);
  // Clopper-Pearson upper bound with no successes: 1 - (alpha/2)^(1/n).
  CHECK(curve[0].ci_hi == doctest::Approx(1.0 - std::pow(0.025, 1.0 / cfg.n_cas)).epsilon(1e-10));
}

TEST_CASE("Clopper-Pearson") {
  const auto ci = clopper_pearson(5, 20);
  CHECK(ci.lo == doctest::Approx(0.0865715).epsilon(1e-5));
  CHECK(ci.hi == doctest::Approx(0.4910459).epsilon(1e-5));
  CHECK(clopper_pearson(20, 20).hi == 1.0);
  CHECK_THROWS_AS(clopper_pearson(3, 2), DomainError);
}

TEST_CASE("belief-based mistake model") {
  auto cfg = small_config();
  cfg.mistake_model = MistakeModel::Belief;
  cfg.consensus_bias = 0.2;
  const auto panel = run_experiment(cfg);
  for (const auto& r : panel.cas) CHECK(r.imposed.has_value() == r.intervened);
}

TEST_CASE("decision noise makes the intensive margin estimable") {
  auto cfg = small_config();
  cfg.n_cas = 1500;
  cfg.consensus_bias = 0.3;
  cfg.phi = Distribution::point(0.9);
  cfg.decision_noise = 0.5;
  const auto panel = run_experiment(cfg);
  std::ostringstream out;
  write_cas_csv(out, panel);
  std::istringstream in(out.str());
  const auto obs = to_observations(read_interventions(in));
  REQUIRE(obs.size() > 1000);
  const auto r = fit(obs);
  REQUIRE(r.converged);
  CHECK(r.ci95_phi.lo < 0.9);
  CHECK(r.ci95_phi.hi > 0.9);
}

TEST_CASE("config json") {
  const auto cfg = read_sim_config(R"({"n_choosers": 50, "n_cas": 4, "phi": {"kind": "two_point", "values": [0.1, 0.9], "weight": 0.3},
                                       "k_grid": [0, 5, "inf"], "seed": 99, "mistake_model": "belief"})");
  CHECK(cfg.n_choosers == 50);
  CHECK(cfg.phi.kind == Distribution::Kind::TwoPoint);
  CHECK(cfg.k_grid.size() == 3);
  CHECK(cfg.k_grid[2].is_exact());
  CHECK(cfg.mistake_model == MistakeModel::Belief);
  const auto again = read_sim_config(to_json(cfg));
  CHECK(to_json(again) == to_json(cfg));
  CHECK(config_hash(again) == config_hash(cfg));

  CHECK_THROWS_AS(read_sim_config(R"({"n_chooser": 5})"), DomainError);
  CHECK_THROWS_AS(read_sim_config(R"({"true_pi": 2})"), DomainError);
  CHECK_THROWS_AS(read_sim_config(R"({"k_grid": []})"), DomainError);
  CHECK_THROWS_AS(read_sim_config(R"({"lottery_threshold": 0.1})"), DomainError);
  CHECK_THROWS_AS(read_sim_config("[1"), DomainError);
}
