#include "paternalism/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "paternalism/errors.hpp"

namespace paternalism::quadrature {

GaussLegendre::GaussLegendre(int n) : nodes_(n), weights_(n), cumulative_(n, n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  constexpr double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (t * p1 - p0) / (t * t - 1.0);
    nodes_(n - 1 - i) = t;  // ascending order
    weights_(n - 1 - i) = 2.0 / ((1.0 - t * t) * dp * dp);
  }

  auto lagrange = [&](int j, double t) {
    double v = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) v *= (t - nodes_(m)) / (nodes_(j) - nodes_(m));
    return v;
  };
  for (int i = 0; i < n; ++i) {
    const double half = 0.5 * (nodes_(i) + 1.0);
    const double mid = 0.5 * (nodes_(i) - 1.0);
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += weights_(m) * lagrange(j, mid + half * nodes_(m));
      cumulative_(i, j) = half * s;
    }
  }
}

namespace {

struct Panel {
  double a, b;
  Eigen::VectorXd fx;
};

}  // namespace

TabulatedDensity::TabulatedDensity(std::function<double(double)> f, double lo, double hi,
                                   std::span<const double> breakpoints, const Options& options)
    : f_(std::move(f)), rule_(options.order) {
  if (!(hi > lo)) throw DomainError("empty integration interval");
  if (options.panels < 1) throw DomainError("need at least one panel");

  std::vector<double> initial;
  initial.reserve(static_cast<std::size_t>(options.panels) + 1 + breakpoints.size());
  for (int i = 0; i <= options.panels; ++i)
    initial.push_back(i == options.panels ? hi : lo + (hi - lo) * i / options.panels);
  for (double bp : breakpoints)
    if (bp > lo && bp < hi) initial.push_back(bp);
  std::sort(initial.begin(), initial.end());
  initial.erase(std::unique(initial.begin(), initial.end()), initial.end());

  const auto& t = rule_.nodes();
  const auto& w = rule_.weights();
  const Eigen::Index n = t.size();
  auto eval_panel = [&](double a, double b) {
    Panel p{a, b, Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) p.fx(i) = f_(0.5 * (a + b) + 0.5 * (b - a) * t(i));
    evaluations_ += static_cast<std::size_t>(n);
    return p;
  };
  auto panel_integral = [&](const Panel& p) { return 0.5 * (p.b - p.a) * w.dot(p.fx); };

  std::vector<Panel> accepted;
  accepted.reserve(initial.size() * 2);
  const double length = hi - lo;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  // Depth-first, left half first, so accepted panels stay ordered: the top
  // of the stack is always the leftmost pending panel.
  std::vector<Panel> todo;
  todo.reserve(initial.size());
  for (std::size_t k = initial.size() - 1; k-- > 0;) todo.push_back(eval_panel(initial[k], initial[k + 1]));
  while (!todo.empty()) {
    Panel p = std::move(todo.back());
    todo.pop_back();
    const double m = 0.5 * (p.a + p.b);
    Panel left = eval_panel(p.a, m);
    Panel right = eval_panel(m, p.b);
    const double coarse = panel_integral(p);
    const double fine = panel_integral(left) + panel_integral(right);
    const double err = std::abs(coarse - fine);
    const double budget = std::max(options.tolerance * (p.b - p.a) / length, 64.0 * eps * std::abs(fine));
    if (!std::isfinite(err)) throw NumericError(fmt::format("non-finite integrand on panel [{}, {}]", p.a, p.b));
    if (err <= budget) {
      accepted.push_back(std::move(left));
      accepted.push_back(std::move(right));
      continue;
    }
    if (accepted.size() + 2 * todo.size() + 4 > static_cast<std::size_t>(options.max_panels) || m <= p.a ||
        m >= p.b) {
      throw NumericError(fmt::format(
          "quadrature did not converge: panel [{:.6g}, {:.6g}] error {:.3g} exceeds budget {:.3g} "
          "after {} panels and {} evaluations",
          p.a, p.b, err, budget, accepted.size(), evaluations_));
    }
    todo.push_back(std::move(right));
    todo.push_back(std::move(left));
  }

  const auto& cum = rule_.cumulative();
  const auto total = static_cast<Eigen::Index>(accepted.size()) * n;
  x_.resize(total);
  fx_.resize(total);
  w_.resize(total);
  cdf_.resize(total);
  edges_.reserve(accepted.size() + 1);
  edge_cdf_.reserve(accepted.size() + 1);
  edges_.push_back(lo);
  edge_cdf_.push_back(0.0);
  double running = 0.0;
  for (std::size_t k = 0; k < accepted.size(); ++k) {
    const auto& p = accepted[k];
    const double half = 0.5 * (p.b - p.a);
    const auto base = static_cast<Eigen::Index>(k) * n;
    const Eigen::VectorXd partial = half * (cum * p.fx);
    for (Eigen::Index i = 0; i < n; ++i) {
      x_(base + i) = 0.5 * (p.a + p.b) + half * t(i);
      fx_(base + i) = p.fx(i);
      w_(base + i) = half * w(i);
      cdf_(base + i) = running + partial(i);
    }
    running += half * w.dot(p.fx);
    edges_.push_back(p.b);
    edge_cdf_.push_back(running);
  }
}

double TabulatedDensity::cdf(double x) const {
  if (x <= edges_.front()) return 0.0;
  if (x >= edges_.back()) return edge_cdf_.back();
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const auto k = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return edge_cdf_[k] + rule_.integrate(f_, edges_[k], x);
}

double TabulatedDensity::quantile(double level, double xtol) const {
  if (level <= 0.0) return edges_.front();
  if (level >= edge_cdf_.back()) return edges_.back();
  const auto it = std::lower_bound(edge_cdf_.begin(), edge_cdf_.end(), level);
  const auto k = static_cast<std::size_t>(it - edge_cdf_.begin());
  double a = edges_[k - 1];
  double b = edges_[k];
  while (b - a > xtol) {
    const double m = 0.5 * (a + b);
    if (cdf(m) < level)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

double TabulatedDensity::argmax(double xtol) const {
  // Candidate points: both ends plus every node, in ascending order.
  const Eigen::Index n = x_.size();
  auto point = [&](Eigen::Index i) { return i == 0 ? lo() : i == n + 1 ? hi() : x_(i - 1); };
  auto value = [&](Eigen::Index i) { return i == 0 || i == n + 1 ? f_(point(i)) : fx_(i - 1); };

  Eigen::Index best = 0;
  double best_val = value(0);
  for (Eigen::Index i = 1; i <= n + 1; ++i) {
    const double v = value(i);
    if (v > best_val) best = i, best_val = v;
  }
  double a = point(std::max<Eigen::Index>(best - 1, 0));
  double b = point(std::min<Eigen::Index>(best + 1, n + 1));

  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f_(c), fd = f_(d);
  while (b - a > xtol) {
    if (fc >= fd) {
      b = d, d = c, fd = fc;
      c = b - ratio * (b - a);
      fc = f_(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + ratio * (b - a);
      fd = f_(d);
    }
  }
  const double x = 0.5 * (a + b);
  // A maximum on the boundary converges to within xtol of it.
  if (best == 0 && x - lo() <= 10 * xtol && f_(lo()) >= f_(x)) return lo();
  if (best == n + 1 && hi() - x <= 10 * xtol && f_(hi()) >= f_(x)) return hi();
  return x;
}

}  // namespace paternalism::quadrature
