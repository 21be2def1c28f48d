#pragma once

#include <utility>
#include <vector>

#include "convreg/bregman.hpp"
#include "convreg/variational.hpp"

namespace convreg {

/// alpha(delta) = sqrt(delta) (tau + 1) ||T*||. Requires tau >= 1.
double alpha_sqrt_rule(double delta, double tau, double opnorm);

/// alpha(delta) = delta^p for p in (0, 2).
double alpha_power_rule(double delta, double p);

/// tau(L_H) = (1 + ||T*||^2 / L_H)^{1/2}. Always >= 1 and decreasing in L_H;
/// throws HessianLipschitzZero for L_H = 0 (quadratic penalty), where the
/// formula is undefined and a fixed tau must be supplied instead.
double tau_of_hessian_lipschitz(double hessian_lipschitz, double opnorm);

/// Regularization-parameter choice rule.
struct ParamRule {
  enum class Kind { Sqrt, Power, HessianSqrt };

  Kind kind = Kind::Sqrt;
  double tau = 1.0;                // Sqrt
  double p = 1.0;                  // Power
  double hessian_lipschitz = 0.0;  // HessianSqrt
  double opnorm = 1.0;

  static ParamRule sqrt_rule(double tau, double opnorm);
  static ParamRule power_rule(double p);
  static ParamRule hessian_sqrt_rule(double hessian_lipschitz, double opnorm);

  double alpha(double delta) const;
  /// tau used in the admissibility bound ||T phi - f|| <= tau delta:
  /// the fixed tau for Sqrt/Power, tau(L_H) for HessianSqrt.
  double admissibility_tau() const;
  const char* kind_name() const;
};

struct AdmissibilityRecord {
  double alpha = 0.0;
  double discrepancy = 0.0;  // ||T phi_alpha - f_delta||
  double bound = 0.0;        // tau * delta
  bool admissible = false;
  /// Allowance for the iterative solver: how far the discrepancy of the
  /// computed iterate can sit above the exact minimizer's, derived from the
  /// final gradient norm and the curvature sigma_min(T)^2 + curvature_hint.
  double solver_slack = 0.0;
};

/// Compares the discrepancy of a converged solve against tau * delta.
/// curvature_hint should be a lower bound on the penalty part of the
/// Hessian of F (2 alpha c*); pass 0 when unknown.
AdmissibilityRecord check_admissible(const ForwardOperator& op, const Vec& f_delta,
                                     const SolveResult& phi_alpha, double tau,
                                     double delta, double curvature_hint = 0.0);

struct DiscrepancySearchResult {
  double alpha = 0.0;
  AdmissibilityRecord record;
  SolveResult solution;
  int evaluations = 0;
};

/// Bisection on log alpha for the largest admissible alpha in
/// [alpha_lo, alpha_hi]. Preconditions: delta > 0 and the bracket holds,
/// discrepancy(alpha_lo) <= tau delta <= discrepancy(alpha_hi); if
/// discrepancy(alpha_hi) is already admissible, alpha_hi is returned
/// directly. Discrepancy monotonicity in alpha is asserted across all
/// evaluations of the run. At most 40 bisection steps, stopping early once
/// the log-bracket width is <= bisect_tol.
DiscrepancySearchResult discrepancy_search(const ForwardOperator& op,
                                           const Vec& f_delta, const Penalty& penalty,
                                           double tau, double delta, double alpha_lo,
                                           double alpha_hi, double bisect_tol,
                                           const SolveConfig& cfg = {});

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||T phi_alpha - f_delta|| <= delta + ||phi_alpha - phi_true|| ||T*||.
/// Requires the data to be consistent with the declared noise level,
/// ||f_delta - T phi_true|| <= delta (1 + 1e-12).
InequalityCheck residual_bound_check(const ForwardOperator& op, const Vec& phi_alpha,
                                     const Vec& phi_true, const Vec& f_delta,
                                     double delta);

/// alpha (J(phi_alpha) - J(phi_true)) <= 1/2 delta^2 + solver slack.
InequalityCheck weak_convergence_check(const CostFunctional& F,
                                       const SolveResult& phi_alpha,
                                       const Vec& phi_true, double delta);

struct HessianDiscrepancyReport {
  double discrepancy = 0.0;     // lhs
  double main_term = 0.0;       // delta * tau(L_H of F)
  double remainder = 0.0;       // sqrt(2 L_H(F) ||phi_alpha - phi_true||^2)
  double slack = 0.0;           // main + remainder - discrepancy
  double tau_lh = 0.0;
  double cost_hessian_lipschitz = 0.0;
  bool holds = false;
};

/// Discrepancy bound for twice-differentiable penalties:
///   ||T phi_alpha - f_delta|| <= delta tau(L_H) + remainder,
/// where L_H is the Hessian Lipschitz constant of F_alpha
/// (= alpha * L_H(J); the misfit Hessian is constant) and the remainder is
/// the third-order Taylor term. Throws HessianLipschitzZero for L_H = 0.
HessianDiscrepancyReport hessian_discrepancy_diagnostic(const CostFunctional& F,
                                                        const SolveResult& phi_alpha,
                                                        const Vec& phi_true,
                                                        double delta,
                                                        double cost_hessian_lipschitz);

}  // namespace convreg
