#include "paternalism/welfare.hpp"

#include <algorithm>
#include <vector>

namespace paternalism {

PolicyDecision optimal_policy(const CAProfile& ca, double belief_q, const PopulationState& pop, double tol) {
  if (!(tol > 0.0)) throw DomainError("tie tolerance must be positive");

  PolicyDecision d;
  d.welfare[static_cast<std::size_t>(Alternative::ImposeOne)] = welfare_imposed(ca, belief_q, OptionId::One);
  d.welfare[static_cast<std::size_t>(Alternative::ImposeTwo)] = welfare_imposed(ca, belief_q, OptionId::Two);
  d.welfare[static_cast<std::size_t>(Alternative::LaissezFaire)] = welfare_freedom(ca, pop);

  // Tie-break priority.
  std::vector<Alternative> remaining{Alternative::LaissezFaire, impose(ca.preferred),
                                     impose(complement(ca.preferred))};
  for (auto& slot : d.ranking) {
    double best = d.welfare_of(remaining.front());
    for (Alternative a : remaining) best = std::max(best, d.welfare_of(a));
    // First entry in priority order that ties with the maximum.
    auto it = std::find_if(remaining.begin(), remaining.end(),
                           [&](Alternative a) { return d.welfare_of(a) >= best - tol; });
    slot = *it;
    remaining.erase(it);
  }
  d.choice = d.ranking.front();
  return d;
}

}  // namespace paternalism
