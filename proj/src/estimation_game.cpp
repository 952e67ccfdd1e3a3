#include "paternalism/estimation_game.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "paternalism/csv.hpp"
#include "paternalism/errors.hpp"

namespace paternalism {

Knowledge Knowledge::draws(int k) {
  if (k < 0) throw DomainError("number of draws must be nonnegative");
  Knowledge kn;
  kn.draws_ = k;
  return kn;
}

int Knowledge::k() const {
  if (!draws_) throw DomainError("exact knowledge has no draw count");
  return *draws_;
}

std::string to_string(const Knowledge& k) { return k.is_exact() ? "inf" : std::to_string(k.k()); }

Knowledge parse_knowledge(std::string_view text) {
  if (text == "inf" || text == "exact" || text == "Inf" || text == "∞") return Knowledge::exact();
  const auto v = csv::parse_int(text);
  if (v < 0 || v > std::numeric_limits<int>::max()) throw DomainError(fmt::format("invalid k '{}'", text));
  return Knowledge::draws(static_cast<int>(v));
}

void EstimationGame::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  if (!(y_lo <= z && z <= y_hi)) throw DomainError("payoffs must satisfy y_lo <= z <= y_hi");
}

BetaParams beta_posterior_params(int n, int k) {
  if (k < 0 || n < 0 || n > k) throw DomainError("posterior needs 0 <= n <= k");
  return {static_cast<double>(n) + 1.0, static_cast<double>(k - n) + 1.0};
}

namespace {

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError(fmt::format("{} must lie in [0, 1]", what));
}

// m * log(v), with 0 * log(0) = 0.
double xlogy(double m, double v) { return m == 0.0 ? 0.0 : m * std::log(v); }

double log_choose(int k, int n) {
  return std::lgamma(k + 1.0) - std::lgamma(n + 1.0) - std::lgamma(k - n + 1.0);
}

}  // namespace

double binomial_log_pmf(int n, int k, double p) {
  if (n < 0 || n > k) return -std::numeric_limits<double>::infinity();
  return log_choose(k, n) + xlogy(n, p) + xlogy(k - n, 1.0 - p);
}

MarginalPosterior::MarginalPosterior(int k, double p, PdfMethod method) : k_(k), p_(p), method_(method) {
  if (k < 0) throw DomainError("k must be nonnegative");
  check_unit(p, "p");
  log_mix_.resize(static_cast<std::size_t>(k) + 1);
  for (int n = 0; n <= k; ++n) {
    // log B(n + 1, k - n + 1)
    const double log_beta = std::lgamma(n + 1.0) + std::lgamma(k - n + 1.0) - std::lgamma(k + 2.0);
    log_mix_[static_cast<std::size_t>(n)] = binomial_log_pmf(n, k, p) - log_beta;
  }
  hyp_coeffs_.resize(static_cast<std::size_t>(k) + 1);
  double c = 1.0;  // C(k, j)
  for (int j = 0; j <= k; ++j) {
    hyp_coeffs_[static_cast<std::size_t>(j)] = c * c;
    c = c * (k - j) / (j + 1.0);
  }
}

double MarginalPosterior::sum_form(double x) const {
  check_unit(x, "x");
  if (k_ == 0) return 1.0;
  // Streaming log-sum-exp over the finite terms.
  double running_max = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (int n = 0; n <= k_; ++n) {
    const double t = log_mix_[static_cast<std::size_t>(n)] + xlogy(n, x) + xlogy(k_ - n, 1.0 - x);
    if (!std::isfinite(t)) continue;
    if (t <= running_max) {
      acc += std::exp(t - running_max);
    } else {
      acc = acc * std::exp(running_max - t) + 1.0;
      running_max = t;
    }
  }
  return acc == 0.0 ? 0.0 : std::exp(running_max + std::log(acc));
}

double MarginalPosterior::hypergeometric_form(double x) const {
  check_unit(x, "x");
  const double kp1 = k_ + 1.0;
  if (k_ == 0) return 1.0;
  if (p_ == 0.0) return kp1 * std::pow(1.0 - x, k_);
  if (p_ == 1.0) return kp1 * std::pow(x, k_);

  // Terminating series 2F1(-k, -k; 1; w) = sum_j C(k, j)^2 w^j. Its
  // coefficients are symmetric, so for w > 1 evaluate w^k 2F1(1/w) instead.
  auto series = [&](double w) {
    double s = 0.0;
    for (auto it = hyp_coeffs_.rbegin(); it != hyp_coeffs_.rend(); ++it) s = s * w + *it;
    return s;
  };
  const double a = p_ * x;                  // numerator of w
  const double b = (1.0 - p_) * (1.0 - x);  // denominator of w
  if (a <= b) return kp1 * std::pow(b, k_) * series(a / b);
  return kp1 * std::pow(a, k_) * series(b / a);
}

double MarginalPosterior::operator()(double x) const {
  switch (method_) {
    case PdfMethod::Sum: return sum_form(x);
    case PdfMethod::Hypergeometric: return hypergeometric_form(x);
    case PdfMethod::Auto: break;
  }
  return k_ <= kHypergeometricMaxK ? hypergeometric_form(x) : sum_form(x);
}

double marginal_posterior_pdf(int k, double p, double x, PdfMethod method) {
  return MarginalPosterior(k, p, method)(x);
}

double marginal_mean_closed(int k, double p) {
  if (k < 0) throw DomainError("k must be nonnegative");
  check_unit(p, "p");
  return (k * p + 1.0) / (k + 2.0);
}

PosteriorSummary posterior_summary(const Knowledge& knowledge, double p, double ref_p,
                                   const quadrature::Options& options) {
  check_unit(p, "p");
  check_unit(ref_p, "reference p");
  if (options.panels < 64) throw DomainError("posterior_summary needs at least 64 quadrature panels");

  PosteriorSummary s;
  if (knowledge.is_exact()) {
    s.mean = s.median = p;
    s.mode = p;
    s.variance = 0.0;
    s.mae = s.rmse = std::abs(p - ref_p);
    s.kl = std::numeric_limits<double>::infinity();
    s.w1 = 0.5 * p * p + 0.5 * (1.0 - p) * (1.0 - p);
    return s;
  }

  const int k = knowledge.k();
  const MarginalPosterior post(k, p);
  const std::array<double, 2> breaks{ref_p, p};
  const quadrature::TabulatedDensity dens([&post](double x) { return post(x); }, 0.0, 1.0, breaks, options);

  const double mass = dens.mass();
  if (std::abs(mass - 1.0) > 1e-6)
    throw NumericError(fmt::format("marginal posterior (k={}, p={}) integrates to {} over {} panels", k, p, mass,
                                   dens.panel_count()));

  s.mean = dens.integrate([](double x, double f, double) { return x * f; });
  s.variance = dens.integrate([m = s.mean](double x, double f, double) { return (x - m) * (x - m) * f; });
  s.mae = dens.integrate([ref_p](double x, double f, double) { return std::abs(x - ref_p) * f; });
  s.rmse = std::sqrt(dens.integrate([ref_p](double x, double f, double) { return (x - ref_p) * (x - ref_p) * f; }));
  s.kl = dens.integrate([](double, double f, double) { return f > 0.0 ? f * std::log(f) : 0.0; });
  s.w1 = dens.integrate([](double x, double, double F) { return std::abs(F - x); });
  s.median = dens.quantile(0.5);
  if (k > 0) s.mode = dens.argmax();
  return s;
}

int sample_draws(const EstimationGame& game, SeedStream& stream) {
  game.validate();
  const int k = game.knowledge.k();
  if (k == 0 || game.p == 0.0) return 0;
  return std::binomial_distribution<int>(k, game.p)(stream.engine());
}

double risk_neutral_threshold(const EstimationGame& game) {
  game.validate();
  if (game.y_hi == game.y_lo) return 0.0;
  return (game.y_hi - game.z) / (game.y_hi - game.y_lo);
}

OptionId posterior_mean_choice(const EstimationGame& game, int n, double loss_threshold) {
  double loss;
  if (game.knowledge.is_exact()) {
    loss = game.p;
  } else {
    const int k = game.knowledge.k();
    if (n < 0 || n > k) throw DomainError("observed losses must satisfy 0 <= n <= k");
    loss = (n + 1.0) / (k + 2.0);
  }
  return loss < loss_threshold ? OptionId::Two : OptionId::One;
}

OptionId chooser_choice(const EstimationGame& game, int n) {
  return posterior_mean_choice(game, n, risk_neutral_threshold(game));
}

double mistake_probability(const EstimationGame& game, const ChooserRule& rule) {
  game.validate();
  const ChooserRule& choose = rule ? rule : ChooserRule(chooser_choice);
  const int k = game.knowledge.k();
  const OptionId informed = choose(game.with_knowledge(Knowledge::exact()), 0);
  double prob = 0.0;
  for (int n = 0; n <= k; ++n)
    if (choose(game, n) != informed) prob += std::exp(binomial_log_pmf(n, k, game.p));
  return std::min(prob, 1.0);
}

}  // namespace paternalism
