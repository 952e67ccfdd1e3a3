#pragma once

// Welfare of a Choice Architect (CA) over the three governance alternatives:
// impose Option One, impose Option Two, or leave the menu {One, Two} to the
// Chooser. The formulas are templated on the scalar so they can be evaluated
// with plain doubles, long doubles, or an automatic-differentiation type.

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

#include "paternalism/errors.hpp"

namespace paternalism {

enum class OptionId { One, Two };

constexpr OptionId complement(OptionId o) noexcept {
  return o == OptionId::One ? OptionId::Two : OptionId::One;
}

constexpr std::string_view to_string(OptionId o) noexcept {
  return o == OptionId::One ? "One" : "Two";
}

template <typename Scalar>
struct BasicCAProfile {
  OptionId preferred = OptionId::One;
  Scalar phi = Scalar(0);  // weight on the CA's own preference
};

// Chooser population: true share preferring One and the two mistake rates.
//   eps_x: prefer One, choose Two.   eps_y: prefer Two, choose One.
template <typename Scalar>
struct BasicPopulationState {
  Scalar pi = Scalar(0.5);
  Scalar eps_x = Scalar(0);
  Scalar eps_y = Scalar(0);

  Scalar pi_prime() const { return pi - eps_x + eps_y; }

  BasicPopulationState without_mistakes() const { return {pi, Scalar(0), Scalar(0)}; }

  // Relabel the options: One <-> Two.
  BasicPopulationState mirrored() const { return {Scalar(1) - pi, eps_y, eps_x}; }
};

template <typename Scalar>
struct BasicBeliefSet {
  Scalar pi_belief = Scalar(0.5);        // believed full-information share preferring One
  Scalar pi_prime_belief = Scalar(0.5);  // believed share actually choosing One
};

using CAProfile = BasicCAProfile<double>;
using PopulationState = BasicPopulationState<double>;
using BeliefSet = BasicBeliefSet<double>;

namespace detail {

template <typename Scalar>
bool in_unit(const Scalar& v) {
  return v >= Scalar(0) && v <= Scalar(1);
}

}  // namespace detail

template <typename Scalar>
void validate(const BasicCAProfile<Scalar>& ca) {
  if (!detail::in_unit(ca.phi)) throw DomainError("phi must lie in [0, 1]");
}

template <typename Scalar>
void validate(const BasicPopulationState<Scalar>& pop) {
  if (!detail::in_unit(pop.pi)) throw DomainError("pi must lie in [0, 1]");
  if (!detail::in_unit(pop.eps_x) || !detail::in_unit(pop.eps_y))
    throw DomainError("mistake rates must lie in [0, 1]");
  if (pop.eps_x > pop.pi) throw DomainError("eps_x exceeds pi");
  if (pop.eps_y > Scalar(1) - pop.pi) throw DomainError("eps_y exceeds 1 - pi");
}

template <typename Scalar>
void validate(const BasicBeliefSet<Scalar>& b) {
  if (!detail::in_unit(b.pi_belief) || !detail::in_unit(b.pi_prime_belief))
    throw DomainError("beliefs must lie in [0, 1]");
}

namespace detail {

template <typename Scalar>
Scalar welfare_imposed_unchecked(const BasicCAProfile<Scalar>& ca, const Scalar& q, OptionId option) {
  // Share of Choosers sharing the CA's preference.
  const Scalar agree = ca.preferred == OptionId::One ? q : Scalar(1) - q;
  if (option == ca.preferred) return ca.phi + agree * (Scalar(1) - ca.phi);
  return (Scalar(1) - agree) * (Scalar(1) - ca.phi);
}

}  // namespace detail

// Welfare of imposing `option` when the CA believes a share q of Choosers
// prefers Option One.
template <typename Scalar>
Scalar welfare_imposed(const BasicCAProfile<Scalar>& ca, const Scalar& q, OptionId option) {
  validate(ca);
  if (!detail::in_unit(q)) throw DomainError("belief q must lie in [0, 1]");
  return detail::welfare_imposed_unchecked(ca, q, option);
}

// Welfare of freedom of choice, evaluated as the mixture over the two choice
// groups: those choosing One (a share pi') and those choosing Two, each
// weighted by the conditional share of its members who truly prefer One.
template <typename Scalar>
Scalar welfare_freedom(const BasicCAProfile<Scalar>& ca, const BasicPopulationState<Scalar>& pop) {
  validate(ca);
  validate(pop);
  const Scalar choose_one = pop.pi_prime();
  const Scalar choose_two = Scalar(1) - choose_one;
  Scalar w = Scalar(0);
  if (choose_one > Scalar(0)) {
    const Scalar q = (pop.pi - pop.eps_x) / choose_one;
    w += choose_one * detail::welfare_imposed_unchecked(ca, q, OptionId::One);
  }
  if (choose_two > Scalar(0)) {
    const Scalar q = pop.eps_x / choose_two;
    w += choose_two * detail::welfare_imposed_unchecked(ca, q, OptionId::Two);
  }
  return w;
}

// Closed form of welfare_freedom. For a One-preferring CA:
//   1 - phi (1 - pi - 2 eps_y) - eps_x - eps_y
template <typename Scalar>
Scalar welfare_freedom_closed(const BasicCAProfile<Scalar>& ca, const BasicPopulationState<Scalar>& pop) {
  validate(ca);
  validate(pop);
  const Scalar mistakes = pop.eps_x + pop.eps_y;
  if (ca.preferred == OptionId::One)
    return Scalar(1) - ca.phi * (Scalar(1) - pop.pi - Scalar(2) * pop.eps_y) - mistakes;
  return Scalar(1) - ca.phi * (pop.pi - Scalar(2) * pop.eps_x) - mistakes;
}

// Change in the welfare of freedom caused by Chooser mistakes.
template <typename Scalar>
Scalar freedom_delta(const BasicCAProfile<Scalar>& ca, const BasicPopulationState<Scalar>& pop) {
  return welfare_freedom(ca, pop) - welfare_freedom(ca, pop.without_mistakes());
}

// Belief below which imposing Two beats imposing One for a One-preferring CA.
// Empty for phi >= 1/2, where the frontier leaves the unit square.
template <typename Scalar>
std::optional<Scalar> boundary_q(const Scalar& phi) {
  if (!detail::in_unit(phi)) throw DomainError("phi must lie in [0, 1]");
  if (phi >= Scalar(0.5)) return std::nullopt;
  return (Scalar(1) - Scalar(2) * phi) / (Scalar(2) * (Scalar(1) - phi));
}

template <typename Scalar>
bool mistakes_benefit_ca(const BasicCAProfile<Scalar>& ca, const BasicBeliefSet<Scalar>& beliefs) {
  validate(beliefs);
  if (ca.preferred == OptionId::One) return beliefs.pi_prime_belief > beliefs.pi_belief;
  return beliefs.pi_prime_belief < beliefs.pi_belief;
}

// ---------------------------------------------------------------------------
// Ternary comparison

enum class Alternative { ImposeOne, ImposeTwo, LaissezFaire };

constexpr std::string_view to_string(Alternative a) noexcept {
  switch (a) {
    case Alternative::ImposeOne: return "impose_one";
    case Alternative::ImposeTwo: return "impose_two";
    case Alternative::LaissezFaire: return "laissez_faire";
  }
  return "";
}

constexpr Alternative impose(OptionId o) noexcept {
  return o == OptionId::One ? Alternative::ImposeOne : Alternative::ImposeTwo;
}

constexpr bool is_intervention(Alternative a) noexcept { return a != Alternative::LaissezFaire; }

constexpr std::optional<OptionId> imposed_option(Alternative a) noexcept {
  if (a == Alternative::ImposeOne) return OptionId::One;
  if (a == Alternative::ImposeTwo) return OptionId::Two;
  return std::nullopt;
}

struct PolicyDecision {
  Alternative choice = Alternative::LaissezFaire;
  std::array<Alternative, 3> ranking{};  // best first
  std::array<double, 3> welfare{};       // indexed by Alternative

  double welfare_of(Alternative a) const { return welfare[static_cast<std::size_t>(a)]; }
  bool intervened() const { return is_intervention(choice); }
};

inline constexpr double kDefaultTieTolerance = 1e-12;

// Computes the three welfares and ranks them. Welfares within `tol` of each
// other are ties; ties go to LaissezFaire first, then to the CA's own option.
PolicyDecision optimal_policy(const CAProfile& ca, double belief_q, const PopulationState& pop,
                              double tol = kDefaultTieTolerance);

// Convenience form with belief_q = pop.pi.
inline PolicyDecision optimal_policy(const CAProfile& ca, const PopulationState& pop,
                                     double tol = kDefaultTieTolerance) {
  return optimal_policy(ca, pop.pi, pop, tol);
}

}  // namespace paternalism
