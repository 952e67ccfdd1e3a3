#pragma once

// The Estimation Game: a Chooser sees k draws from the lottery (Option Two)
// before choosing between it and a safe amount (Option One). With a uniform
// prior on the loss probability p, n losses out of k give the posterior
// Beta(n + 1, k - n + 1); averaging over n ~ Binomial(k, p) gives the
// marginal posterior that a fully informed observer expects the Chooser to
// hold.

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "paternalism/quadrature.hpp"
#include "paternalism/seed_stream.hpp"
#include "paternalism/welfare.hpp"

namespace paternalism {

// Number of lottery draws a Chooser observes, or exact knowledge of p.
class Knowledge {
 public:
  static Knowledge draws(int k);
  static Knowledge exact() { return Knowledge{}; }

  bool is_exact() const { return !draws_; }
  // Throws DomainError for exact knowledge.
  int k() const;

  friend bool operator==(const Knowledge&, const Knowledge&) = default;

 private:
  std::optional<int> draws_;
};

// "inf" for exact knowledge, the draw count otherwise.
std::string to_string(const Knowledge& k);
Knowledge parse_knowledge(std::string_view text);

struct EstimationGame {
  Knowledge knowledge = Knowledge::exact();
  double p = 0.2;      // probability of the low lottery outcome
  double z = 15.0;     // safe amount
  double y_lo = 0.0;   // low lottery outcome
  double y_hi = 20.0;  // high lottery outcome

  void validate() const;

  EstimationGame with_knowledge(Knowledge k) const {
    auto g = *this;
    g.knowledge = k;
    return g;
  }
};

struct BetaParams {
  double alpha;
  double beta;
};

BetaParams beta_posterior_params(int n, int k);

enum class PdfMethod { Sum, Hypergeometric, Auto };

// Largest k for which PdfMethod::Auto uses the hypergeometric polynomial.
inline constexpr int kHypergeometricMaxK = 50;

// Marginal posterior density of p for fixed (k, p), with the per-term
// constants precomputed for repeated evaluation.
class MarginalPosterior {
 public:
  MarginalPosterior(int k, double p, PdfMethod method = PdfMethod::Auto);

  double operator()(double x) const;
  double sum_form(double x) const;
  double hypergeometric_form(double x) const;

  int k() const { return k_; }
  double p() const { return p_; }

 private:
  int k_;
  double p_;
  PdfMethod method_;
  std::vector<double> log_mix_;      // log Binomial(k, p) mass at n, minus log B(n+1, k-n+1)
  std::vector<double> hyp_coeffs_;   // C(k, j)^2
};

double marginal_posterior_pdf(int k, double p, double x, PdfMethod method = PdfMethod::Auto);

// (k p + 1) / (k + 2)
double marginal_mean_closed(int k, double p);

struct PosteriorSummary {
  double mean = 0.0;
  double median = 0.0;
  std::optional<double> mode;  // absent when the density is flat (k = 0)
  double variance = 0.0;
  double mae = 0.0;   // E|X - ref|
  double rmse = 0.0;  // sqrt E (X - ref)^2
  double kl = 0.0;    // KL(posterior || uniform), nats
  double w1 = 0.0;    // Wasserstein-1 distance to uniform
};

// Summary statistics by adaptive quadrature of the marginal posterior.
// options.panels must be at least 64.
PosteriorSummary posterior_summary(const Knowledge& knowledge, double p, double ref_p,
                                   const quadrature::Options& options = {});

// Number of losses seen in k draws.
int sample_draws(const EstimationGame& game, SeedStream& stream);

// Decides for a Chooser given the observed losses (ignored when the Chooser
// knows p exactly).
using ChooserRule = std::function<OptionId(const EstimationGame&, int n)>;

// Loss probability below which a risk-neutral Chooser prefers the lottery:
// (y_hi - z) / (y_hi - y_lo).
double risk_neutral_threshold(const EstimationGame& game);

// Lottery iff the posterior-mean loss (n + 1) / (k + 2), or p itself under
// exact knowledge, is strictly below `loss_threshold`; ties go to the safe
// option.
OptionId posterior_mean_choice(const EstimationGame& game, int n, double loss_threshold);

// Risk-neutral posterior-mean rule.
OptionId chooser_choice(const EstimationGame& game, int n);

// Probability, over n ~ Binomial(k, p), that `rule` picks a different option
// than it would with exact knowledge of p. Defaults to the risk-neutral rule.
double mistake_probability(const EstimationGame& game, const ChooserRule& rule = {});

// log of the Binomial(k, p) mass at n.
double binomial_log_pmf(int n, int k, double p);

}  // namespace paternalism
