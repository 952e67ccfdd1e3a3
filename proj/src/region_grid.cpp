#include "paternalism/region_grid.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "paternalism/csv.hpp"

namespace paternalism {

std::size_t RegionGrid::count(Alternative a) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [a](const PolicyDecision& d) { return d.choice == a; }));
}

RegionGrid region_grid(Eigen::Index phi_steps, Eigen::Index q_steps, const std::optional<MistakeTemplate>& mistakes,
                       const RegionGridOptions& options) {
  if (phi_steps < 2 || q_steps < 2) throw DomainError("grid needs at least 2 steps per axis");
  const MistakeTemplate m = mistakes.value_or(MistakeTemplate{});
  if (m.eps_x < 0.0 || m.eps_x > 1.0 || m.eps_y < 0.0 || m.eps_y > 1.0)
    throw DomainError("mistake rates must lie in [0, 1]");

  RegionGrid grid;
  grid.preferred = options.preferred;
  grid.mistakes = m;
  grid.phi = Eigen::VectorXd::LinSpaced(phi_steps, 0.0, 1.0);
  grid.q = Eigen::VectorXd::LinSpaced(q_steps, 0.0, 1.0);
  grid.cells.resize(static_cast<std::size_t>(phi_steps * q_steps));

  auto fill_rows = [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index i = begin; i < end; ++i) {
      const CAProfile ca{options.preferred, grid.phi(i)};
      for (Eigen::Index j = 0; j < q_steps; ++j) {
        const double pi = grid.q(j);
        const PopulationState pop{pi, std::min(m.eps_x, pi), std::min(m.eps_y, 1.0 - pi)};
        grid.cells[static_cast<std::size_t>(i * q_steps + j)] = optimal_policy(ca, pi, pop, options.tol);
      }
    }
  };

  const auto workers = static_cast<Eigen::Index>(std::max(1u, options.threads));
  if (workers == 1) {
    fill_rows(0, phi_steps);
  } else {
    std::vector<std::jthread> pool;
    const Eigen::Index chunk = (phi_steps + workers - 1) / workers;
    for (Eigen::Index b = 0; b < phi_steps; b += chunk) pool.emplace_back(fill_rows, b, std::min(phi_steps, b + chunk));
  }
  return grid;
}

void write_region_csv(std::ostream& out, const RegionGrid& grid, std::optional<int> digits) {
  out << "phi,q,decision,rank1,rank2,rank3\n";
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      const auto& d = grid.at(i, j);
      fmt::print(out, "{},{},{},{},{},{}\n", csv::format_number(grid.phi(i), digits),
                 csv::format_number(grid.q(j), digits), to_string(d.choice), to_string(d.ranking[0]),
                 to_string(d.ranking[1]), to_string(d.ranking[2]));
    }
  }
}

namespace {

constexpr const char* color_of(Alternative a) {
  switch (a) {
    case Alternative::ImposeOne: return "#d62728";
    case Alternative::ImposeTwo: return "#2ca02c";
    case Alternative::LaissezFaire: return "#1f77b4";
  }
  return "#000000";
}

}  // namespace

void write_region_svg(std::ostream& out, const RegionGrid& grid) {
  constexpr double plot = 400.0;
  constexpr double margin = 50.0;
  constexpr double legend_w = 170.0;
  const double cw = plot / static_cast<double>(grid.rows());
  const double ch = plot / static_cast<double>(grid.cols());

  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
             plot + 2 * margin + legend_w, plot + 2 * margin, plot + 2 * margin + legend_w, plot + 2 * margin);
  fmt::print(out, "<title>Optimal CA decisions (preferred option {}, eps_x={}, eps_y={})</title>\n",
             to_string(grid.preferred), grid.mistakes.eps_x, grid.mistakes.eps_y);
  out << "<g shape-rendering=\"crispEdges\" stroke=\"none\">\n";
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      const double x = margin + static_cast<double>(i) * cw;
      const double y = margin + plot - static_cast<double>(j + 1) * ch;  // q grows upward
      fmt::print(out, "<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"{}\"/>\n", x, y,
                 cw, ch, color_of(grid.at(i, j).choice));
    }
  }
  out << "</g>\n";
  fmt::print(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", margin,
             margin, plot, plot);
  fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">phi</text>\n", margin + plot / 2,
             margin + plot + 35);
  fmt::print(out,
             "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\" "
             "transform=\"rotate(-90 {} {})\">q = pi</text>\n",
             margin - 30, margin + plot / 2, margin - 30, margin + plot / 2);
  for (double t : {0.0, 0.5, 1.0}) {
    fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
               margin + t * plot, margin + plot + 15, t);
    fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n", margin - 5,
               margin + plot - t * plot + 4, t);
  }

  const double lx = margin + plot + 20;
  int row = 0;
  for (Alternative a : {Alternative::ImposeOne, Alternative::ImposeTwo, Alternative::LaissezFaire}) {
    const double ly = margin + 20.0 * row++;
    fmt::print(out, "<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"14\" fill=\"{}\"/>\n", lx, ly, color_of(a));
    fmt::print(out, "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n", lx + 20, ly + 11, to_string(a));
  }
  out << "</svg>\n";
}

}  // namespace paternalism
