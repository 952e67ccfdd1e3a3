#include "paternalism/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace paternalism {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd start,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const NelderMeadOptions& options) {
  const Eigen::Index dim = start.size();
  auto project = [&](Eigen::VectorXd x) { return x.cwiseMax(lower).cwiseMin(upper).eval(); };

  NelderMeadResult result;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    return f(x);
  };

  std::vector<Eigen::VectorXd> simplex;
  simplex.push_back(project(start));
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::VectorXd v = simplex.front();
    v(i) += options.initial_step;
    if (v(i) > upper(i)) v(i) = simplex.front()(i) - options.initial_step;
    simplex.push_back(project(v));
  }
  std::vector<double> values;
  for (const auto& v : simplex) values.push_back(eval(v));

  std::vector<std::size_t> order(simplex.size());
  while (result.evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double diameter = 0.0;
    for (const auto& v : simplex) diameter = std::max(diameter, (v - simplex[best]).cwiseAbs().maxCoeff());
    if (values[worst] - values[best] <= options.f_tol * (1.0 + std::abs(values[best])) &&
        diameter <= options.x_tol * (1.0 + simplex[best].cwiseAbs().maxCoeff())) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < simplex.size(); ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd reflected = project(centroid + (centroid - simplex[worst]));
    const double fr = eval(reflected);
    if (fr < values[best]) {
      const Eigen::VectorXd expanded = project(centroid + 2.0 * (centroid - simplex[worst]));
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded, values[worst] = fe;
      } else {
        simplex[worst] = reflected, values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected, values[worst] = fr;
      continue;
    }
    // Contraction, outside or inside.
    const bool outside = fr < values[worst];
    const Eigen::VectorXd contracted =
        outside ? project(centroid + 0.5 * (reflected - centroid)) : project(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted, values[worst] = fc;
      continue;
    }
    // Shrink towards the best vertex.
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = project(simplex[best] + 0.5 * (simplex[i] - simplex[best]));
      values[i] = eval(simplex[i]);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(it - values.begin())];
  result.value = *it;
  return result;
}

}  // namespace paternalism
