#pragma once

#include <functional>

#include <Eigen/Core>

namespace paternalism {

struct NelderMeadOptions {
  int max_evaluations = 4000;
  double f_tol = 1e-12;   // spread of simplex values
  double x_tol = 1e-10;   // simplex diameter
  double initial_step = 0.1;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Derivative-free simplex minimisation inside the box [lower, upper]
// (infinite bounds allowed). Trial points are projected onto the box.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd start,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const NelderMeadOptions& options = {});

}  // namespace paternalism
