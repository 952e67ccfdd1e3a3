#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "paternalism/welfare.hpp"

namespace paternalism {

// Mistake rates applied to every cell of a decision-region grid. Where a
// cell's pi makes a rate infeasible (eps_x > pi or eps_y > 1 - pi) the rate is
// capped at the largest feasible value for that cell.
struct MistakeTemplate {
  double eps_x = 0.0;
  double eps_y = 0.0;
};

// Optimal decisions on the lattice phi x q over [0, 1]^2, endpoints included,
// with belief q equal to the true share pi. Cells are stored row-major:
// row i is phi(i), column j is q(j).
struct RegionGrid {
  OptionId preferred = OptionId::One;
  MistakeTemplate mistakes;
  Eigen::VectorXd phi;
  Eigen::VectorXd q;
  std::vector<PolicyDecision> cells;

  Eigen::Index rows() const { return phi.size(); }
  Eigen::Index cols() const { return q.size(); }
  const PolicyDecision& at(Eigen::Index i, Eigen::Index j) const {
    return cells[static_cast<std::size_t>(i * cols() + j)];
  }
  std::size_t count(Alternative a) const;
};

struct RegionGridOptions {
  OptionId preferred = OptionId::One;
  double tol = kDefaultTieTolerance;
  unsigned threads = 1;
};

RegionGrid region_grid(Eigen::Index phi_steps, Eigen::Index q_steps,
                       const std::optional<MistakeTemplate>& mistakes = std::nullopt,
                       const RegionGridOptions& options = {});

// CSV with header phi,q,decision,rank1,rank2,rank3.
void write_region_csv(std::ostream& out, const RegionGrid& grid, std::optional<int> digits = std::nullopt);

// Self-contained SVG heatmap: phi on the horizontal axis, q vertical.
void write_region_svg(std::ostream& out, const RegionGrid& grid);

}  // namespace paternalism
