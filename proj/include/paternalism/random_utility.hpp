#pragma once

// Fechner-type binary choice model of the intensive margin. A CA of type
// theta imposes Option One when
//   W_theta(One) - W_theta(Two) + noise > 0,  noise ~ N(0, sigma^2),
// so P(impose One) = Phi(gap / sigma). The self-interest weight phi and the
// noise scale sigma are estimated by maximum likelihood.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "paternalism/seed_stream.hpp"
#include "paternalism/welfare.hpp"

namespace paternalism {

struct ObservationRecord {
  OptionId ca_type = OptionId::One;
  double pi_belief = 0.5;
  bool imposed_one = true;
};

// W_theta(One) - W_theta(Two) at belief pi.
double welfare_gap(OptionId theta, double phi, double pi);

// Standard normal CDF via the complementary error function.
double normal_cdf(double z);

double impose_probability(OptionId theta, double phi, double pi, double sigma);

// Probabilities below this are floored before taking logs.
inline constexpr double kProbabilityFloor = 1e-300;

struct LikelihoodDiagnostics {
  std::size_t floored_terms = 0;
};

// Sum over records of log P(observed outcome), accumulated by pairwise
// summation.
double log_likelihood(std::span<const ObservationRecord> data, double phi, double sigma,
                      LikelihoodDiagnostics* diagnostics = nullptr);

struct FitOptions {
  double phi_init = 0.5;
  double sigma_init = 1.0;
  int max_iter = 100;              // Newton polish iterations
  double tol = 1e-10;              // Newton step size on (phi, ln sigma)
  double hessian_step = 1e-5;      // on (phi, ln sigma)
  int max_simplex_evaluations = 2000;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct FitResult {
  double phi_hat = 0.0;
  double sigma_hat = 0.0;
  std::optional<Eigen::Matrix2d> vcov;  // over (phi, sigma)
  Interval ci95_phi;
  Interval ci95_sigma;
  double loglik = 0.0;
  double gradient_norm = 0.0;  // finite-difference gradient of loglik over (phi, sigma)
  bool converged = false;
  int iterations = 0;
  std::size_t n_obs = 0;
  std::size_t floored_terms = 0;
  std::string diagnostic;
};

// Refuses (converged = false) when both outcomes are not present or when
// neither CA type nor belief varies.
FitResult fit(std::span<const ObservationRecord> data, const FitOptions& options = {});

// True ("imposed One") where impose_probability >= threshold.
std::vector<bool> predict_classify(std::span<const ObservationRecord> data, const FitResult& fit,
                                   double threshold = 0.5);

// Joint correctness of two classifiers: counts(a, b) with index 0 = wrong,
// 1 = correct; rows for classifier A, columns for classifier B.
struct ConfusionTable {
  Eigen::Matrix<long long, 2, 2> counts = Eigen::Matrix<long long, 2, 2>::Zero();
  long long total() const { return counts.sum(); }
};

ConfusionTable confusion_compare(const std::vector<bool>& pred_a, const std::vector<bool>& pred_b,
                                 const std::vector<bool>& actual);

// Records drawn from the model itself: CA types One with probability
// share_one, beliefs uniform on [pi_lo, pi_hi], outcomes from
// impose_probability at (phi, sigma).
std::vector<ObservationRecord> synthetic_observations(std::size_t n, double phi, double sigma, double pi_lo,
                                                      double pi_hi, SeedStream& stream, double share_one = 0.5);

// ---------------------------------------------------------------------------
// Files

// One row of the intervention CSV (ca_id,ca_pref,pi,intervened,imposed).
struct InterventionRow {
  std::string ca_id;
  OptionId ca_pref = OptionId::One;
  double pi = 0.5;
  bool intervened = false;
  std::optional<OptionId> imposed;
};

std::vector<InterventionRow> read_interventions(std::istream& in);

// Intensive-margin observations: rows with intervened = 0 are dropped.
std::vector<ObservationRecord> to_observations(std::span<const InterventionRow> rows);

std::string to_json(const FitResult& fit);
FitResult fit_from_json(const std::string& text);

}  // namespace paternalism
