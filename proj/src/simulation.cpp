#include "paternalism/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <boost/math/special_functions/beta.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "paternalism/csv.hpp"
#include "paternalism/errors.hpp"

namespace paternalism {

namespace {

// Stream labels.
constexpr std::uint64_t kChooserStream = 1;
constexpr std::uint64_t kCAStream = 2;
constexpr std::uint64_t kExactLabel = std::numeric_limits<std::uint64_t>::max();

std::uint64_t k_label(const Knowledge& k) {
  return k.is_exact() ? kExactLabel : static_cast<std::uint64_t>(k.k());
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

nlohmann::ordered_json distribution_json(const Distribution& d) {
  nlohmann::ordered_json j;
  switch (d.kind) {
    case Distribution::Kind::Point:
      j["kind"] = "point";
      j["value"] = d.a;
      break;
    case Distribution::Kind::Uniform:
      j["kind"] = "uniform";
      j["lo"] = d.a;
      j["hi"] = d.b;
      break;
    case Distribution::Kind::TwoPoint:
      j["kind"] = "two_point";
      j["values"] = {d.a, d.b};
      j["weight"] = d.w;
      break;
  }
  return j;
}

Distribution distribution_from_json(const nlohmann::json& j, const char* what) {
  if (j.is_number()) return Distribution::point(j.get<double>());
  if (!j.is_object() || !j.contains("kind"))
    throw DomainError(fmt::format("{}: expected a number or an object with a 'kind'", what));
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "point") return Distribution::point(j.at("value").get<double>());
  if (kind == "uniform") return Distribution::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (kind == "two_point") {
    const auto& v = j.at("values");
    if (!v.is_array() || v.size() != 2) throw DomainError(fmt::format("{}: two_point needs two values", what));
    return Distribution::two_point(v[0].get<double>(), v[1].get<double>(), j.value("weight", 0.5));
  }
  throw DomainError(fmt::format("{}: unknown distribution kind '{}'", what, kind));
}

}  // namespace

double Distribution::sample(SeedStream& s) const {
  switch (kind) {
    case Kind::Point: return a;
    case Kind::Uniform: return a + (b - a) * s.uniform();
    case Kind::TwoPoint: return s.bernoulli(w) ? a : b;
  }
  return a;
}

double Distribution::min() const { return kind == Kind::Point ? a : std::min(a, b); }
double Distribution::max() const { return kind == Kind::Point ? a : std::max(a, b); }

void Distribution::validate(const char* what) const {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError(fmt::format("{}: non-finite parameter", what));
  if (kind == Kind::Uniform && a > b) throw DomainError(fmt::format("{}: uniform needs lo <= hi", what));
  if (kind == Kind::TwoPoint && !(w >= 0.0 && w <= 1.0))
    throw DomainError(fmt::format("{}: two_point weight must lie in [0, 1]", what));
}

std::vector<Knowledge> SimConfig::default_k_grid() {
  std::vector<Knowledge> grid;
  for (int k : {0, 1, 2, 5, 10, 25, 50, 1000}) grid.push_back(Knowledge::draws(k));
  grid.push_back(Knowledge::exact());
  return grid;
}

Distribution SimConfig::lottery_thresholds() const {
  return lottery_threshold ? *lottery_threshold : Distribution::uniform(risk_neutral_threshold(payoffs), 1.0);
}

Distribution SimConfig::safe_thresholds() const {
  return safe_threshold ? *safe_threshold : Distribution::point(0.0);
}

void SimConfig::validate() const {
  if (n_choosers < 1) throw DomainError("n_choosers must be at least 1");
  if (n_cas < 0) throw DomainError("n_cas must be non-negative");
  if (!(true_pi >= 0.0 && true_pi <= 1.0)) throw DomainError("true_pi must lie in [0, 1]");
  phi.validate("phi");
  if (phi.min() < 0.0 || phi.max() > 1.0) throw DomainError("phi distribution must be supported on [0, 1]");
  if (!(consensus_bias >= -1.0 && consensus_bias <= 1.0)) throw DomainError("consensus_bias must lie in [-1, 1]");
  if (k_grid.empty()) throw DomainError("k_grid must not be empty");
  payoffs.validate();
  const auto lottery = lottery_thresholds();
  const auto safe = safe_thresholds();
  lottery.validate("lottery_threshold");
  safe.validate("safe_threshold");
  // Under exact knowledge each Chooser must pick the option it prefers.
  if (!(lottery.min() > payoffs.p))
    throw DomainError(fmt::format("lottery thresholds must exceed p = {}", payoffs.p));
  if (safe.max() > payoffs.p) throw DomainError(fmt::format("safe thresholds must not exceed p = {}", payoffs.p));
  if (!(decision_noise >= 0.0) || !std::isfinite(decision_noise))
    throw DomainError("decision_noise must be a finite non-negative number");
}

SimConfig read_sim_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  static const std::vector<std::string> known{"n_choosers",   "n_cas",          "true_pi",          "phi",
                                              "consensus_bias", "k_grid",       "payoffs",          "lottery_threshold",
                                              "safe_threshold", "decision_noise", "mistake_model", "seed"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw DomainError(fmt::format("unknown config key '{}'", key));

  SimConfig cfg;
  try {
    cfg.n_choosers = j.value("n_choosers", cfg.n_choosers);
    cfg.n_cas = j.value("n_cas", cfg.n_cas);
    cfg.true_pi = j.value("true_pi", cfg.true_pi);
    if (j.contains("phi")) cfg.phi = distribution_from_json(j["phi"], "phi");
    cfg.consensus_bias = j.value("consensus_bias", cfg.consensus_bias);
    if (j.contains("k_grid")) {
      cfg.k_grid.clear();
      for (const auto& k : j["k_grid"]) {
        if (k.is_number_integer()) cfg.k_grid.push_back(Knowledge::draws(k.get<int>()));
        else if (k.is_string()) cfg.k_grid.push_back(parse_knowledge(k.get<std::string>()));
        else throw DomainError("k_grid entries must be integers or \"inf\"");
      }
    }
    if (j.contains("payoffs")) {
      const auto& p = j["payoffs"];
      cfg.payoffs.p = p.value("p", cfg.payoffs.p);
      cfg.payoffs.z = p.value("z", cfg.payoffs.z);
      cfg.payoffs.y_lo = p.value("y_lo", cfg.payoffs.y_lo);
      cfg.payoffs.y_hi = p.value("y_hi", cfg.payoffs.y_hi);
    }
    if (j.contains("lottery_threshold"))
      cfg.lottery_threshold = distribution_from_json(j["lottery_threshold"], "lottery_threshold");
    if (j.contains("safe_threshold"))
      cfg.safe_threshold = distribution_from_json(j["safe_threshold"], "safe_threshold");
    cfg.decision_noise = j.value("decision_noise", cfg.decision_noise);
    if (j.contains("mistake_model")) {
      const auto m = j["mistake_model"].get<std::string>();
      if (m == "empirical") cfg.mistake_model = MistakeModel::Empirical;
      else if (m == "belief") cfg.mistake_model = MistakeModel::Belief;
      else throw DomainError(fmt::format("unknown mistake_model '{}'", m));
    }
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(fmt::format("bad config value: {}", e.what()));
  }
  cfg.validate();
  return cfg;
}

std::string to_json(const SimConfig& cfg) {
  nlohmann::ordered_json j;
  j["n_choosers"] = cfg.n_choosers;
  j["n_cas"] = cfg.n_cas;
  j["true_pi"] = cfg.true_pi;
  j["phi"] = distribution_json(cfg.phi);
  j["consensus_bias"] = cfg.consensus_bias;
  auto grid = nlohmann::ordered_json::array();
  for (const auto& k : cfg.k_grid) {
    if (k.is_exact()) grid.push_back("inf");
    else grid.push_back(k.k());
  }
  j["k_grid"] = grid;
  j["payoffs"] = {{"p", cfg.payoffs.p}, {"z", cfg.payoffs.z}, {"y_lo", cfg.payoffs.y_lo}, {"y_hi", cfg.payoffs.y_hi}};
  j["lottery_threshold"] = distribution_json(cfg.lottery_thresholds());
  j["safe_threshold"] = distribution_json(cfg.safe_thresholds());
  j["decision_noise"] = cfg.decision_noise;
  j["mistake_model"] = cfg.mistake_model == MistakeModel::Empirical ? "empirical" : "belief";
  j["seed"] = cfg.seed;
  return j.dump();
}

std::uint64_t config_hash(const SimConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ChooserCohort simulate_choosers(const SimConfig& cfg, const Knowledge& k, const SeedStream& root) {
  const auto game = cfg.payoffs.with_knowledge(k);
  game.validate();
  const auto lottery = cfg.lottery_thresholds();
  const auto safe = cfg.safe_thresholds();

  ChooserCohort cohort;
  cohort.records.reserve(static_cast<std::size_t>(cfg.n_choosers));
  long long prefer_one = 0, one_chose_two = 0, two_chose_one = 0;
  for (int i = 0; i < cfg.n_choosers; ++i) {
    auto traits = root.substream({kChooserStream, static_cast<std::uint64_t>(i)});
    const OptionId pref = traits.bernoulli(cfg.true_pi) ? OptionId::One : OptionId::Two;
    const double threshold = (pref == OptionId::One ? safe : lottery).sample(traits);

    ChooserRecord rec;
    rec.chooser_id = i;
    rec.k = k;
    rec.true_pref = pref;
    int n = 0;
    if (!k.is_exact()) {
      auto draws = root.substream({kChooserStream, static_cast<std::uint64_t>(i), k_label(k)});
      n = sample_draws(game, draws);
      rec.n_observed = n;
    }
    rec.choice = posterior_mean_choice(game, n, threshold);

    if (pref == OptionId::One) {
      ++prefer_one;
      if (rec.choice == OptionId::Two) ++one_chose_two;
    } else if (rec.choice == OptionId::One) {
      ++two_chose_one;
    }
    cohort.records.push_back(rec);
  }
  const double N = cfg.n_choosers;
  cohort.population = PopulationState{prefer_one / N, one_chose_two / N, two_chose_one / N};
  return cohort;
}

std::vector<SimulatedCA> simulate_cas(const SimConfig& cfg, const SeedStream& root) {
  std::vector<SimulatedCA> cas;
  cas.reserve(static_cast<std::size_t>(cfg.n_cas));
  for (int j = 0; j < cfg.n_cas; ++j) {
    auto s = root.substream({kCAStream, static_cast<std::uint64_t>(j)});
    SimulatedCA ca;
    ca.ca_id = j;
    ca.profile.preferred = s.bernoulli(cfg.true_pi) ? OptionId::One : OptionId::Two;
    ca.profile.phi = cfg.phi.sample(s);
    // False consensus: each CA overstates the share sharing its preference.
    const double shift = ca.profile.preferred == OptionId::One ? cfg.consensus_bias : -cfg.consensus_bias;
    ca.pi_belief = clamp01(cfg.true_pi + shift);
    cas.push_back(ca);
  }
  return cas;
}

BeliefSet beliefs_for(const SimulatedCA& ca, const PopulationState& cohort) {
  return BeliefSet{ca.pi_belief, clamp01(ca.pi_belief + cohort.pi_prime() - cohort.pi)};
}

namespace {

// Mistake shares a CA plugs into the freedom welfare.
PopulationState population_for(const SimConfig& cfg, const SimulatedCA& ca, const PopulationState& cohort) {
  if (cfg.mistake_model == MistakeModel::Empirical) return cohort;
  const double rate_x = cohort.pi > 0.0 ? cohort.eps_x / cohort.pi : 0.0;
  const double rate_y = cohort.pi < 1.0 ? cohort.eps_y / (1.0 - cohort.pi) : 0.0;
  return PopulationState{ca.pi_belief, ca.pi_belief * rate_x, (1.0 - ca.pi_belief) * rate_y};
}

}  // namespace

SimPanel run_experiment(const SimConfig& cfg) {
  cfg.validate();
  const SeedStream root(cfg.seed);

  SimPanel panel;
  panel.k_grid = cfg.k_grid;
  for (const auto& k : cfg.k_grid) {
    auto cohort = simulate_choosers(cfg, k, root);
    panel.populations.push_back(cohort.population);
    panel.choosers.insert(panel.choosers.end(), cohort.records.begin(), cohort.records.end());
  }

  const auto cas = simulate_cas(cfg, root);
  panel.cas.reserve(cas.size() * cfg.k_grid.size());
  for (const auto& ca : cas) {
    for (std::size_t g = 0; g < cfg.k_grid.size(); ++g) {
      const auto& k = cfg.k_grid[g];
      const auto& cohort = panel.populations[g];
      const auto pop = population_for(cfg, ca, cohort);
      const auto decision = optimal_policy(ca.profile, ca.pi_belief, pop);

      CARecord rec;
      rec.ca_id = ca.ca_id;
      rec.k = k;
      rec.ca_pref = ca.profile.preferred;
      rec.phi = ca.profile.phi;
      rec.pi_belief = ca.pi_belief;
      rec.pi_prime_belief = beliefs_for(ca, cohort).pi_prime_belief;
      rec.intervened = decision.intervened();
      if (rec.intervened) {
        if (cfg.decision_noise > 0.0) {
          auto s = root.substream({kCAStream, static_cast<std::uint64_t>(ca.ca_id), k_label(k)});
          const double p_one =
              impose_probability(ca.profile.preferred, ca.profile.phi, ca.pi_belief, cfg.decision_noise);
          rec.imposed = s.bernoulli(p_one) ? OptionId::One : OptionId::Two;
        } else {
          rec.imposed = imposed_option(decision.choice);
        }
      }
      panel.cas.push_back(rec);
    }
  }
  return panel;
}

Interval clopper_pearson(long long x, long long n, double level) {
  if (n < 1 || x < 0 || x > n) throw DomainError("Clopper-Pearson needs 0 <= x <= n and n >= 1");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  const double alpha = 1.0 - level;
  const double xs = static_cast<double>(x), ns = static_cast<double>(n);
  Interval ci{0.0, 1.0};
  if (x > 0) ci.lo = boost::math::ibeta_inv(xs, ns - xs + 1.0, alpha / 2.0);
  if (x < n) ci.hi = boost::math::ibeta_inv(xs + 1.0, ns - xs, 1.0 - alpha / 2.0);
  return ci;
}

std::vector<RatePoint> intervention_rate_curve(const SimPanel& panel) {
  std::vector<RatePoint> curve;
  for (const auto& k : panel.k_grid) {
    RatePoint pt;
    pt.k = k;
    for (const auto& r : panel.cas) {
      if (!(r.k == k)) continue;
      ++pt.n;
      if (r.intervened) ++pt.interventions;
    }
    if (pt.n > 0) {
      pt.rate = static_cast<double>(pt.interventions) / static_cast<double>(pt.n);
      const auto ci = clopper_pearson(pt.interventions, pt.n);
      pt.ci_lo = ci.lo;
      pt.ci_hi = ci.hi;
    }
    curve.push_back(pt);
  }
  return curve;
}

namespace {

int option_code(OptionId o) { return o == OptionId::One ? 1 : 2; }

}  // namespace

void write_cas_csv(std::ostream& out, const SimPanel& panel) {
  out << "ca_id,ca_pref,pi,intervened,imposed,k,phi\n";
  for (const auto& r : panel.cas) {
    out << r.ca_id << ',' << option_code(r.ca_pref) << ',' << csv::format_number(r.pi_belief) << ','
        << (r.intervened ? 1 : 0) << ',' << (r.imposed ? std::to_string(option_code(*r.imposed)) : "NA") << ','
        << to_string(r.k) << ',' << csv::format_number(r.phi) << '\n';
  }
}

void write_choosers_csv(std::ostream& out, const SimPanel& panel) {
  out << "chooser_id,k,n_observed,choice,true_pref\n";
  for (const auto& r : panel.choosers) {
    out << r.chooser_id << ',' << to_string(r.k) << ',' << (r.n_observed ? std::to_string(*r.n_observed) : "")
        << ',' << option_code(r.choice) << ',' << option_code(r.true_pref) << '\n';
  }
}

void write_rates_csv(std::ostream& out, const std::vector<RatePoint>& rates) {
  out << "k,n,interventions,rate,ci_lo,ci_hi\n";
  for (const auto& r : rates) {
    out << to_string(r.k) << ',' << r.n << ',' << r.interventions << ',' << csv::format_number(r.rate) << ','
        << csv::format_number(r.ci_lo) << ',' << csv::format_number(r.ci_hi) << '\n';
  }
}

}  // namespace paternalism
