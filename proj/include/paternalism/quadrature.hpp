#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace paternalism::quadrature {

// n-point Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int n);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  // cumulative()(i, j) = integral of the j-th Lagrange basis polynomial over
  // [-1, nodes(i)]. Multiplying by function values at the nodes gives the
  // running integral at every node, exact for polynomials of degree < n.
  const Eigen::MatrixXd& cumulative() const { return cumulative_; }

  template <typename F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (Eigen::Index i = 0; i < nodes_.size(); ++i) s += weights_(i) * f(mid + half * nodes_(i));
    return half * s;
  }

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd cumulative_;
};

struct Options {
  int panels = 4096;         // initial uniform panels on the interval
  int order = 8;             // Gauss-Legendre points per panel
  double tolerance = 1e-12;  // absolute error budget for the integral of f
  int max_panels = 1 << 20;
};

// A nonnegative function tabulated on an adaptively refined partition of
// [lo, hi]. A panel is bisected until its n-point rule and the sum of the
// rules on its halves agree within tolerance * width / (hi - lo); the
// accepted halves carry the tabulation. Throws NumericError when the panel
// budget is exhausted.
class TabulatedDensity {
 public:
  TabulatedDensity(std::function<double(double)> f, double lo, double hi, std::span<const double> breakpoints,
                   const Options& options = {});

  // Sum over nodes of weight * g(x, f(x), F(x)), where F is the running
  // integral of f from lo.
  template <typename G>
  double integrate(G&& g) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x_.size(); ++i) s += w_(i) * g(x_(i), fx_(i), cdf_(i));
    return s;
  }

  double mass() const { return edge_cdf_.back(); }
  double cdf(double x) const;
  double operator()(double x) const { return f_(x); }

  // Smallest x with cdf(x) >= level, by bisection to `xtol`.
  double quantile(double level, double xtol = 1e-10) const;

  // Location of the maximum of f: best tabulated point, refined by golden
  // section between its neighbours.
  double argmax(double xtol = 1e-10) const;

  std::size_t panel_count() const { return edges_.size() - 1; }
  std::size_t evaluations() const { return evaluations_; }
  double lo() const { return edges_.front(); }
  double hi() const { return edges_.back(); }

 private:
  std::function<double(double)> f_;
  GaussLegendre rule_;
  std::vector<double> edges_;
  std::vector<double> edge_cdf_;
  Eigen::ArrayXd x_, fx_, w_, cdf_;
  std::size_t evaluations_ = 0;
};

}  // namespace paternalism::quadrature
