#pragma once

// Seeded Monte Carlo panels of the Estimation Game experiment. Choosers with
// heterogeneous risk thresholds see k lottery draws and choose by the
// posterior-mean rule; CAs with self-interest weight phi and (possibly
// consensus-biased) beliefs pick the welfare-maximising governance given the
// mistakes that the cohort actually makes at each k.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "paternalism/estimation_game.hpp"
#include "paternalism/random_utility.hpp"
#include "paternalism/seed_stream.hpp"
#include "paternalism/welfare.hpp"

namespace paternalism {

// point(v), uniform(lo, hi), or two_point(v1, v2, w) with P(v1) = w.
struct Distribution {
  enum class Kind { Point, Uniform, TwoPoint };
  Kind kind = Kind::Point;
  double a = 0.0;
  double b = 0.0;
  double w = 1.0;

  static Distribution point(double v) { return {Kind::Point, v, v, 1.0}; }
  static Distribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi, 1.0}; }
  static Distribution two_point(double v1, double v2, double w) { return {Kind::TwoPoint, v1, v2, w}; }

  double sample(SeedStream& s) const;
  double min() const;
  double max() const;
  void validate(const char* what) const;
};

enum class MistakeModel {
  Empirical,  // CAs evaluate freedom with the cohort's realised (pi, eps_x, eps_y)
  Belief,     // CAs combine their own belief pi with the cohort's conditional mistake rates
};

struct SimConfig {
  int n_choosers = 10000;
  int n_cas = 300;
  double true_pi = 0.3;  // share of Choosers (and CAs) preferring Option One
  Distribution phi = Distribution::uniform(0.0, 1.0);
  double consensus_bias = 0.0;
  std::vector<Knowledge> k_grid = default_k_grid();
  EstimationGame payoffs{};  // knowledge is taken from k_grid

  // Loss-probability thresholds of the posterior-mean rule. Lottery-preferring
  // Choosers need thresholds above p, safe-preferring ones at most p.
  // Defaults: uniform(risk-neutral threshold, 1) and point(0).
  std::optional<Distribution> lottery_threshold;
  std::optional<Distribution> safe_threshold;

  // Scale of Fechner noise on the intensive margin; 0 imposes the better option.
  double decision_noise = 0.0;
  MistakeModel mistake_model = MistakeModel::Empirical;
  std::uint64_t seed = 1;

  static std::vector<Knowledge> default_k_grid();
  Distribution lottery_thresholds() const;
  Distribution safe_thresholds() const;
  void validate() const;
};

SimConfig read_sim_config(const std::string& json_text);
std::string to_json(const SimConfig& cfg);
// FNV-1a of the canonical JSON form.
std::uint64_t config_hash(const SimConfig& cfg);

struct ChooserRecord {
  int chooser_id = 0;
  Knowledge k;
  std::optional<int> n_observed;  // absent under exact knowledge
  OptionId choice = OptionId::One;
  OptionId true_pref = OptionId::One;
};

struct ChooserCohort {
  std::vector<ChooserRecord> records;
  PopulationState population;  // empirical shares
};

// Chooser i keeps its preference and threshold across k (stream {chooser, i});
// the draws at k come from stream {chooser, i, k}.
ChooserCohort simulate_choosers(const SimConfig& cfg, const Knowledge& k, const SeedStream& root);

struct SimulatedCA {
  int ca_id = 0;
  CAProfile profile;
  double pi_belief = 0.5;
};

std::vector<SimulatedCA> simulate_cas(const SimConfig& cfg, const SeedStream& root);

// The CA's pi belief together with pi' shifted by the cohort's realised
// choice shift pi' - pi.
BeliefSet beliefs_for(const SimulatedCA& ca, const PopulationState& cohort);

struct CARecord {
  int ca_id = 0;
  Knowledge k;
  bool intervened = false;
  std::optional<OptionId> imposed;
  OptionId ca_pref = OptionId::One;
  double pi_belief = 0.5;
  double pi_prime_belief = 0.5;
  double phi = 0.0;
};

struct SimPanel {
  std::vector<CARecord> cas;           // CA-major, k in grid order
  std::vector<ChooserRecord> choosers; // k-major, chooser order
  std::vector<Knowledge> k_grid;
  std::vector<PopulationState> populations;  // per k
};

SimPanel run_experiment(const SimConfig& cfg);

struct RatePoint {
  Knowledge k;
  long long n = 0;
  long long interventions = 0;
  double rate = 0.0;
  double ci_lo = 0.0;  // Clopper-Pearson 95%
  double ci_hi = 1.0;
};

std::vector<RatePoint> intervention_rate_curve(const SimPanel& panel);

// Exact binomial 95% interval for x successes out of n.
Interval clopper_pearson(long long x, long long n, double level = 0.95);

void write_cas_csv(std::ostream& out, const SimPanel& panel);
void write_choosers_csv(std::ostream& out, const SimPanel& panel);
void write_rates_csv(std::ostream& out, const std::vector<RatePoint>& rates);

}  // namespace paternalism
