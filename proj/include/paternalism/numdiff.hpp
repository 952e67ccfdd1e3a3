#pragma once

// Central finite differences with one Richardson extrapolation step:
//   D = (4 D(h/2) - D(h)) / 3

#include <Eigen/Core>

namespace paternalism::numdiff {

template <typename F>
Eigen::VectorXd central_gradient(F&& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

template <typename F>
Eigen::VectorXd gradient(F&& f, const Eigen::VectorXd& x, double h) {
  return (4.0 * central_gradient(f, x, 0.5 * h) - central_gradient(f, x, h)) / 3.0;
}

template <typename F>
Eigen::MatrixXd central_hessian(F&& f, const Eigen::VectorXd& x, double h) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd H(n, n);
  const double f0 = f(x);
  auto shifted = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
    Eigen::VectorXd y = x;
    y(i) += di;
    y(j) += dj;
    return f(y);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    H(i, i) = (shifted(i, h, i, 0.0) - 2.0 * f0 + shifted(i, -h, i, 0.0)) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      H(i, j) = (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) + shifted(i, -h, j, -h)) /
                (4.0 * h * h);
      H(j, i) = H(i, j);
    }
  }
  return H;
}

template <typename F>
Eigen::MatrixXd hessian(F&& f, const Eigen::VectorXd& x, double h) {
  return (4.0 * central_hessian(f, x, 0.5 * h) - central_hessian(f, x, h)) / 3.0;
}

}  // namespace paternalism::numdiff
