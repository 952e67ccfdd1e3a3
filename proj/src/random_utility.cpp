#include "paternalism/random_utility.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <json.hpp>

#include "paternalism/csv.hpp"
#include "paternalism/errors.hpp"
#include "paternalism/nelder_mead.hpp"
#include "paternalism/numdiff.hpp"

namespace paternalism {

namespace {

double gap_unchecked(OptionId theta, double phi, double pi) {
  const double own = theta == OptionId::One ? phi : -phi;
  return own + (2.0 * pi - 1.0) * (1.0 - phi);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const auto half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

constexpr double kZ95 = 1.959963984540054;

}  // namespace

double welfare_gap(OptionId theta, double phi, double pi) {
  const CAProfile ca{theta, phi};
  return welfare_imposed(ca, pi, OptionId::One) - welfare_imposed(ca, pi, OptionId::Two);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double impose_probability(OptionId theta, double phi, double pi, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  return normal_cdf(welfare_gap(theta, phi, pi) / sigma);
}

double log_likelihood(std::span<const ObservationRecord> data, double phi, double sigma,
                      LikelihoodDiagnostics* diagnostics) {
  if (data.empty()) throw DomainError("log-likelihood needs at least one observation");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  std::vector<double> terms(data.size());
  std::size_t floored = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data[i];
    const double z = gap_unchecked(r.ca_type, phi, r.pi_belief) / sigma;
    // P(outcome) = Phi(+z) for "imposed One", Phi(-z) otherwise.
    double prob = 0.5 * std::erfc((r.imposed_one ? -z : z) / std::sqrt(2.0));
    if (prob < kProbabilityFloor) {
      prob = kProbabilityFloor;
      ++floored;
    }
    terms[i] = std::log(prob);
  }
  if (diagnostics) diagnostics->floored_terms = floored;
  return pairwise_sum(terms);
}

FitResult fit(std::span<const ObservationRecord> data, const FitOptions& options) {
  if (data.empty()) throw DomainError("cannot fit an empty data set");
  if (!(options.sigma_init > 0.0)) throw DomainError("sigma_init must be positive");
  if (!(options.phi_init >= 0.0 && options.phi_init <= 1.0)) throw DomainError("phi_init must lie in [0, 1]");

  FitResult result;
  result.n_obs = data.size();
  result.phi_hat = options.phi_init;
  result.sigma_hat = options.sigma_init;

  const auto ones = std::count_if(data.begin(), data.end(), [](const auto& r) { return r.imposed_one; });
  const auto type_one = std::count_if(data.begin(), data.end(), [](const auto& r) { return r.ca_type == OptionId::One; });
  const auto [pmin, pmax] = std::minmax_element(data.begin(), data.end(),
                                                [](const auto& a, const auto& b) { return a.pi_belief < b.pi_belief; });
  const bool both_outcomes = ones > 0 && ones < static_cast<long>(data.size());
  const bool both_types = type_one > 0 && type_one < static_cast<long>(data.size());
  const bool belief_variation = pmax->pi_belief - pmin->pi_belief > 1e-12;
  if (!both_outcomes || !(both_types || belief_variation)) {
    result.loglik = log_likelihood(data, options.phi_init, options.sigma_init);
    result.diagnostic = !both_outcomes ? "not identified: all observations share one outcome"
                                       : "not identified: no variation in CA type or belief";
    return result;
  }

  // Negative log-likelihood over (phi, ln sigma).
  auto objective = [&](const Eigen::VectorXd& v) { return -log_likelihood(data, v(0), std::exp(v(1))); };

  constexpr double log_sigma_lo = -13.815510557964274;  // ln 1e-6
  constexpr double log_sigma_hi = 13.815510557964274;
  Eigen::VectorXd lower(2), upper(2);
  lower << 0.0, log_sigma_lo;
  upper << 1.0, log_sigma_hi;
  Eigen::VectorXd start(2);
  start << options.phi_init, std::log(options.sigma_init);

  NelderMeadOptions nm;
  nm.max_evaluations = options.max_simplex_evaluations;
  nm.f_tol = 1e-10;
  nm.x_tol = 1e-7;
  const auto simplex = nelder_mead(objective, start, lower, upper, nm);

  // Newton polish with finite-difference derivatives; phi stays in [0, 1]
  // with an active set at the bounds.
  Eigen::VectorXd x = simplex.x;
  double fx = simplex.value;
  const double h = options.hessian_step;
  bool newton_converged = false;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    const Eigen::VectorXd g = numdiff::gradient(objective, x, h);
    const Eigen::MatrixXd H = numdiff::hessian(objective, x, h);
    const bool at_lower = x(0) <= 0.0 && g(0) > 0.0;
    const bool at_upper = x(0) >= 1.0 && g(0) < 0.0;
    Eigen::VectorXd step = Eigen::VectorXd::Zero(2);
    if (at_lower || at_upper) {
      step(1) = H(1, 1) > 0.0 ? -g(1) / H(1, 1) : -g(1);
    } else {
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all())
        step = -ldlt.solve(g);
      else
        step = -g;
    }
    if (step.norm() < options.tol) {
      newton_converged = true;
      break;
    }
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      Eigen::VectorXd trial = (x + t * step).cwiseMax(lower).cwiseMin(upper);
      const double ft = objective(trial);
      if (ft <= fx) {
        moved = (trial - x).norm() > 0.0;
        x = trial;
        fx = ft;
        break;
      }
    }
    if (!moved) {
      // No descent along the Newton direction: at the optimum up to rounding.
      newton_converged = true;
      break;
    }
  }
  result.iterations = simplex.evaluations + it;
  result.phi_hat = x(0);
  result.sigma_hat = std::exp(x(1));
  LikelihoodDiagnostics diag;
  result.loglik = log_likelihood(data, result.phi_hat, result.sigma_hat, &diag);
  result.floored_terms = diag.floored_terms;

  // Gradient of loglik over (phi, sigma): d/dsigma = d/dln(sigma) / sigma.
  const Eigen::VectorXd g = -numdiff::gradient(objective, x, h);
  result.gradient_norm = std::hypot(g(0), g(1) / result.sigma_hat);

  // Observed information on (phi, ln sigma), mapped to (phi, sigma) with
  // J = diag(1, sigma).
  const Eigen::Matrix2d info = numdiff::hessian(objective, x, h);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(info);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0 || !info.allFinite()) {
    result.converged = false;
    result.diagnostic = "singular or indefinite Hessian at the optimum";
    return result;
  }
  const Eigen::Matrix2d J = Eigen::Vector2d(1.0, result.sigma_hat).asDiagonal();
  const Eigen::Matrix2d cov = J * info.inverse() * J;
  result.vcov = cov;
  const double se_phi = std::sqrt(cov(0, 0));
  const double se_sigma = std::sqrt(cov(1, 1));
  result.ci95_phi = {result.phi_hat - kZ95 * se_phi, result.phi_hat + kZ95 * se_phi};
  result.ci95_sigma = {result.sigma_hat - kZ95 * se_sigma, result.sigma_hat + kZ95 * se_sigma};
  result.converged = newton_converged && std::isfinite(result.loglik);
  if (!newton_converged) result.diagnostic = "Newton polish hit the iteration limit";
  if (diag.floored_terms > 0)
    result.diagnostic += fmt::format("{}{} likelihood terms floored at {}", result.diagnostic.empty() ? "" : "; ",
                                     diag.floored_terms, kProbabilityFloor);
  return result;
}

std::vector<bool> predict_classify(std::span<const ObservationRecord> data, const FitResult& fit, double threshold) {
  if (!fit.converged) throw DomainError("prediction needs a converged fit");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("threshold must lie in [0, 1]");
  std::vector<bool> out;
  out.reserve(data.size());
  for (const auto& r : data)
    out.push_back(impose_probability(r.ca_type, fit.phi_hat, r.pi_belief, fit.sigma_hat) >= threshold);
  return out;
}

ConfusionTable confusion_compare(const std::vector<bool>& pred_a, const std::vector<bool>& pred_b,
                                 const std::vector<bool>& actual) {
  if (pred_a.size() != actual.size() || pred_b.size() != actual.size())
    throw DomainError("prediction and outcome lists differ in length");
  ConfusionTable t;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const int a = pred_a[i] == actual[i] ? 1 : 0;
    const int b = pred_b[i] == actual[i] ? 1 : 0;
    ++t.counts(a, b);
  }
  return t;
}

std::vector<ObservationRecord> synthetic_observations(std::size_t n, double phi, double sigma, double pi_lo,
                                                      double pi_hi, SeedStream& stream, double share_one) {
  if (!(pi_lo >= 0.0 && pi_lo <= pi_hi && pi_hi <= 1.0)) throw DomainError("belief range must satisfy 0 <= lo <= hi <= 1");
  if (!(share_one >= 0.0 && share_one <= 1.0)) throw DomainError("share_one must lie in [0, 1]");
  std::vector<ObservationRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ObservationRecord r;
    r.ca_type = stream.bernoulli(share_one) ? OptionId::One : OptionId::Two;
    r.pi_belief = pi_lo + (pi_hi - pi_lo) * stream.uniform();
    r.imposed_one = stream.bernoulli(impose_probability(r.ca_type, phi, r.pi_belief, sigma));
    out.push_back(r);
  }
  return out;
}

std::vector<InterventionRow> read_interventions(std::istream& in) {
  const auto table = csv::read(in);
  const auto c_id = table.column("ca_id");
  const auto c_pref = table.column("ca_pref");
  const auto c_pi = table.column("pi");
  const auto c_int = table.column("intervened");
  const auto c_imp = table.column("imposed");

  auto option = [](const std::string& s, std::size_t line) {
    if (s == "1") return OptionId::One;
    if (s == "2") return OptionId::Two;
    throw DomainError(fmt::format("row {}: option must be 1 or 2, found '{}'", line, s));
  };

  std::vector<InterventionRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::size_t line = i + 1;
    InterventionRow r;
    r.ca_id = f[c_id];
    r.ca_pref = option(f[c_pref], line);
    r.pi = csv::parse_double(f[c_pi]);
    if (!(r.pi >= 0.0 && r.pi <= 1.0)) throw DomainError(fmt::format("row {}: pi outside [0, 1]", line));
    if (f[c_int] == "1")
      r.intervened = true;
    else if (f[c_int] != "0")
      throw DomainError(fmt::format("row {}: intervened must be 0 or 1", line));
    if (f[c_imp] != "NA" && !f[c_imp].empty()) r.imposed = option(f[c_imp], line);
    if (r.intervened != r.imposed.has_value())
      throw DomainError(fmt::format("row {}: imposed must be given exactly when intervened = 1", line));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ObservationRecord> to_observations(std::span<const InterventionRow> rows) {
  std::vector<ObservationRecord> out;
  for (const auto& r : rows)
    if (r.intervened) out.push_back({r.ca_pref, r.pi, *r.imposed == OptionId::One});
  return out;
}

std::string to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  j["phi_hat"] = fit.phi_hat;
  j["sigma_hat"] = fit.sigma_hat;
  if (fit.vcov) {
    j["ci_phi"] = {num(fit.ci95_phi.lo), num(fit.ci95_phi.hi)};
    j["ci_sigma"] = {num(fit.ci95_sigma.lo), num(fit.ci95_sigma.hi)};
    const auto& v = *fit.vcov;
    j["vcov"] = {{v(0, 0), v(0, 1)}, {v(1, 0), v(1, 1)}};
  } else {
    j["ci_phi"] = nullptr;
    j["ci_sigma"] = nullptr;
    j["vcov"] = nullptr;
  }
  j["loglik"] = num(fit.loglik);
  j["n_obs"] = fit.n_obs;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["gradient_norm"] = num(fit.gradient_norm);
  j["floored_terms"] = fit.floored_terms;
  j["diagnostic"] = fit.diagnostic;
  return j.dump(2);
}

FitResult fit_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(fmt::format("invalid fit JSON: {}", e.what()));
  }
  FitResult f;
  try {
    f.phi_hat = j.at("phi_hat").get<double>();
    f.sigma_hat = j.at("sigma_hat").get<double>();
    f.converged = j.at("converged").get<bool>();
    if (j.contains("n_obs")) f.n_obs = j["n_obs"].get<std::size_t>();
    if (j.contains("loglik") && j["loglik"].is_number()) f.loglik = j["loglik"].get<double>();
    if (j.contains("ci_phi") && j["ci_phi"].is_array()) f.ci95_phi = {j["ci_phi"][0], j["ci_phi"][1]};
    if (j.contains("ci_sigma") && j["ci_sigma"].is_array()) f.ci95_sigma = {j["ci_sigma"][0], j["ci_sigma"][1]};
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(fmt::format("fit JSON is missing fields: {}", e.what()));
  }
  if (!(f.sigma_hat > 0.0)) throw DomainError("fit JSON has non-positive sigma_hat");
  return f;
}

}  // namespace paternalism
