#pragma once

#include <functional>
#include <span>
#include <utility>

#include "convreg/variational.hpp"

namespace convreg {

using Functional = std::function<double(const Vec&)>;
using FunctionalGradient = std::function<Vec(const Vec&)>;

/// D_Phi(u, v) = Phi(u) - Phi(v) - <grad Phi(v), u - v>.
/// Nonnegative (up to rounding) whenever Phi is convex.
double bregman(const Functional& value, const FunctionalGradient& gradient,
               const Vec& u, const Vec& v);

/// Symmetric divergence D_Phi(u,v) + D_Phi(v,u). Computed both as the sum of
/// the two one-sided divergences and as <grad Phi(u) - grad Phi(v), u - v>;
/// the two routes must agree to 1e-9 or an internal-consistency error is
/// thrown. Returns the inner-product value.
double bregman_sym(const Functional& value, const FunctionalGradient& gradient,
                   const Vec& u, const Vec& v);

/// Bregman divergence of the misfit G(x) = 1/2 ||T x - f||^2. Evaluates the
/// three-term formula and asserts agreement with the closed form
/// 1/2 ||T(u - v)||^2 (exact for linear T) to 1e-10.
double bregman_misfit(const ForwardOperator& op, const Vec& f_delta,
                      const Vec& u, const Vec& v);

/// Bregman divergence of the full cost functional.
double bregman_cost(const CostFunctional& F, const Vec& u, const Vec& v);

/// Residual of the stationarity identity that ties the penalty and misfit
/// symmetric divergences together at a minimizer of F:
///
///   <T*(f - T phi_true) - alpha grad J(phi_alpha), phi_alpha - phi_true>
///     = ||T (phi_alpha - phi_true)||^2
///
/// (the left side substitutes the first-order optimality relation for the
/// penalty gradient at phi_true). Returns |lhs - rhs| / (1 + |rhs|); the
/// residual vanishes at exact minimizers and scales with the solver's
/// gradient norm otherwise, so it doubles as a convergence diagnostic.
double sym_identity_check(const CostFunctional& F, const SolveResult& phi_alpha,
                          const Vec& phi_true);
double sym_identity_check(const CostFunctional& F, const Vec& phi_alpha,
                          const Vec& phi_true);

/// Empirical 2-convexity modulus: min over sample pairs of
/// D_Phi(u,v) / ||u-v||^2. Pairs with u == v are skipped; throws if every
/// pair is degenerate.
double q_convexity_estimate(const Functional& value,
                            const FunctionalGradient& gradient,
                            std::span<const std::pair<Vec, Vec>> samples);

/// All divergence diagnostics for one (phi_alpha, phi_true) pair.
struct BregmanReport {
  double d_j = 0.0;
  double d_j_sym = 0.0;
  double d_g = 0.0;
  double d_f = 0.0;
  double sym_identity_residual = 0.0;
  double alpha = 0.0;
};

BregmanReport bregman_report(const CostFunctional& F, const SolveResult& phi_alpha,
                             const Vec& phi_true);

/// Lower 2-convexity constant of the misfit, c = 1/2 sigma_min(T)^2.
struct MisfitConvexityEstimate {
  double c_lower = 0.0;
  bool holds_2convex = false;  // true iff sigma_min(T) > 0
};

MisfitConvexityEstimate misfit_convexity(const ForwardOperator& op);

}  // namespace convreg
