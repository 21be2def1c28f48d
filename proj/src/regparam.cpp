#include "convreg/regparam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace convreg {

double alpha_sqrt_rule(double delta, double tau, double opnorm) {
  if (!(delta > 0.0)) throw std::invalid_argument("alpha_sqrt_rule: delta must be positive");
  if (!(tau >= 1.0)) throw std::invalid_argument("alpha_sqrt_rule: tau must be >= 1");
  if (!(opnorm > 0.0)) throw std::invalid_argument("alpha_sqrt_rule: opnorm must be positive");
  return std::sqrt(delta) * (tau + 1.0) * opnorm;
}

double alpha_power_rule(double delta, double p) {
  if (!(delta > 0.0)) throw std::invalid_argument("alpha_power_rule: delta must be positive");
  if (!(p > 0.0 && p < 2.0)) {
    throw std::invalid_argument("alpha_power_rule: p must lie in (0,2)");
  }
  return std::pow(delta, p);
}

double tau_of_hessian_lipschitz(double hessian_lipschitz, double opnorm) {
  if (!(opnorm > 0.0)) {
    throw std::invalid_argument("tau_of_hessian_lipschitz: opnorm must be positive");
  }
  if (!(hessian_lipschitz > 0.0)) {
    throw std::invalid_argument("HessianLipschitzZero");
  }
  return std::sqrt(1.0 + opnorm * opnorm / hessian_lipschitz);
}

ParamRule ParamRule::sqrt_rule(double tau, double opnorm) {
  if (!(tau >= 1.0)) throw std::invalid_argument("sqrt rule: tau must be >= 1");
  if (!(opnorm > 0.0)) throw std::invalid_argument("sqrt rule: opnorm must be positive");
  ParamRule r;
  r.kind = Kind::Sqrt;
  r.tau = tau;
  r.opnorm = opnorm;
  return r;
}

ParamRule ParamRule::power_rule(double p) {
  if (!(p > 0.0 && p < 2.0)) throw std::invalid_argument("power rule: p must lie in (0,2)");
  ParamRule r;
  r.kind = Kind::Power;
  r.p = p;
  return r;
}

ParamRule ParamRule::hessian_sqrt_rule(double hessian_lipschitz, double opnorm) {
  if (!(hessian_lipschitz > 0.0)) throw std::invalid_argument("HessianLipschitzZero");
  if (!(opnorm > 0.0)) throw std::invalid_argument("hessian sqrt rule: opnorm must be positive");
  ParamRule r;
  r.kind = Kind::HessianSqrt;
  r.hessian_lipschitz = hessian_lipschitz;
  r.opnorm = opnorm;
  return r;
}

double ParamRule::alpha(double delta) const {
  switch (kind) {
    case Kind::Sqrt:
      return alpha_sqrt_rule(delta, tau, opnorm);
    case Kind::Power:
      return alpha_power_rule(delta, p);
    case Kind::HessianSqrt:
      return std::sqrt(delta) *
             (tau_of_hessian_lipschitz(hessian_lipschitz, opnorm) + 1.0) * opnorm;
  }
  throw std::logic_error("unreachable");
}

double ParamRule::admissibility_tau() const {
  if (kind == Kind::HessianSqrt) {
    return tau_of_hessian_lipschitz(hessian_lipschitz, opnorm);
  }
  return tau;
}

const char* ParamRule::kind_name() const {
  switch (kind) {
    case Kind::Sqrt: return "sqrt";
    case Kind::Power: return "power";
    case Kind::HessianSqrt: return "hessian-sqrt";
  }
  return "?";
}

AdmissibilityRecord check_admissible(const ForwardOperator& op, const Vec& f_delta,
                                     const SolveResult& phi_alpha, double tau,
                                     double delta, double curvature_hint) {
  if (!(tau >= 1.0)) throw std::invalid_argument("check_admissible: tau must be >= 1");
  if (delta < 0.0) throw std::invalid_argument("check_admissible: delta must be nonnegative");

  AdmissibilityRecord rec;
  rec.discrepancy = (op.apply(phi_alpha.minimizer) - f_delta).norm();
  rec.bound = tau * delta;
  // The computed iterate sits within grad_norm / curvature of the exact
  // minimizer, which moves the discrepancy by at most ||T|| times that.
  const double smin = op.smallest_singular_value();
  const double curvature = smin * smin + curvature_hint;
  rec.solver_slack = curvature > 0.0
                         ? phi_alpha.grad_norm * op.largest_singular_value() / curvature
                         : std::numeric_limits<double>::infinity();
  rec.admissible = rec.discrepancy <= rec.bound + rec.solver_slack;
  return rec;
}

DiscrepancySearchResult discrepancy_search(const ForwardOperator& op,
                                           const Vec& f_delta, const Penalty& penalty,
                                           double tau, double delta, double alpha_lo,
                                           double alpha_hi, double bisect_tol,
                                           const SolveConfig& cfg) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("discrepancy_search: delta must be positive");
  }
  if (!(alpha_lo > 0.0 && alpha_hi >= alpha_lo)) {
    throw std::invalid_argument("discrepancy_search: need 0 < alpha_lo <= alpha_hi");
  }
  if (!(bisect_tol > 0.0)) {
    throw std::invalid_argument("discrepancy_search: bisect_tol must be positive");
  }

  const double curvature_of = 2.0 * penalty.convexity_modulus2();
  struct Eval {
    double alpha;
    double discrepancy;
  };
  std::vector<Eval> evals;
  int n_evals = 0;

  auto eval = [&](double a) {
    CostFunctional F{op, f_delta, a, penalty};
    SolveResult sol = solve(F, cfg);
    if (!sol.converged) {
      throw std::runtime_error("discrepancy_search: solve did not converge at alpha = " +
                               std::to_string(a));
    }
    AdmissibilityRecord rec = check_admissible(op, f_delta, sol, tau, delta,
                                               a * curvature_of);
    evals.push_back({a, rec.discrepancy});
    ++n_evals;
    return std::make_pair(rec, std::move(sol));
  };

  auto assert_monotone = [&]() {
    std::sort(evals.begin(), evals.end(),
              [](const Eval& a, const Eval& b) { return a.alpha < b.alpha; });
    for (size_t i = 1; i < evals.size(); ++i) {
      const double tol = 1e-9 * (1.0 + evals[i].discrepancy);
      if (evals[i].discrepancy + tol < evals[i - 1].discrepancy) {
        throw std::runtime_error(
            "discrepancy_search: discrepancy not nondecreasing in alpha");
      }
    }
  };

  auto [rec_hi, sol_hi] = eval(alpha_hi);
  if (rec_hi.admissible) {
    // the whole bracket is admissible; largest alpha wins
    DiscrepancySearchResult out;
    out.alpha = alpha_hi;
    out.record = rec_hi;
    out.solution = std::move(sol_hi);
    out.evaluations = n_evals;
    return out;
  }

  auto [rec_lo, sol_lo] = eval(alpha_lo);
  if (!rec_lo.admissible) {
    throw std::runtime_error(
        "discrepancy_search: bracketing failure, discrepancy(" +
        std::to_string(alpha_lo) + ") = " + std::to_string(rec_lo.discrepancy) +
        ", discrepancy(" + std::to_string(alpha_hi) + ") = " +
        std::to_string(rec_hi.discrepancy) + ", bound = " +
        std::to_string(tau * delta));
  }

  double lo = alpha_lo, hi = alpha_hi;
  AdmissibilityRecord best_rec = rec_lo;
  SolveResult best_sol = std::move(sol_lo);
  for (int step = 0; step < 40 && std::log(hi / lo) > bisect_tol; ++step) {
    const double mid = std::sqrt(lo * hi);
    auto [rec, sol] = eval(mid);
    if (rec.admissible) {
      lo = mid;
      best_rec = rec;
      best_sol = std::move(sol);
    } else {
      hi = mid;
    }
  }
  assert_monotone();

  DiscrepancySearchResult out;
  out.alpha = lo;
  out.record = best_rec;
  out.solution = std::move(best_sol);
  out.evaluations = n_evals;
  return out;
}

InequalityCheck residual_bound_check(const ForwardOperator& op, const Vec& phi_alpha,
                                     const Vec& phi_true, const Vec& f_delta,
                                     double delta) {
  const double data_noise = (f_delta - op.apply(phi_true)).norm();
  if (data_noise > delta * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "residual_bound_check: data inconsistent with declared noise level (||f_delta - T phi_true|| = " +
        std::to_string(data_noise) + " > delta = " + std::to_string(delta) + ")");
  }
  InequalityCheck chk;
  chk.lhs = (op.apply(phi_alpha) - f_delta).norm();
  chk.rhs = delta + (phi_alpha - phi_true).norm() * op.largest_singular_value();
  chk.holds = chk.lhs <= chk.rhs + 1e-10;
  return chk;
}

InequalityCheck weak_convergence_check(const CostFunctional& F,
                                       const SolveResult& phi_alpha,
                                       const Vec& phi_true, double delta) {
  InequalityCheck chk;
  chk.lhs = F.alpha * (F.penalty.value(phi_alpha.minimizer) - F.penalty.value(phi_true));
  chk.rhs = 0.5 * delta * delta;
  // F(phi_hat) <= F(phi*) + grad_norm^2 / (2c) for the computed iterate; a
  // grad_norm-proportional slack covers it without needing c.
  const double slack =
      phi_alpha.grad_norm *
      (1.0 + (phi_alpha.minimizer - phi_true).norm());
  chk.holds = chk.lhs <= chk.rhs + slack;
  return chk;
}

HessianDiscrepancyReport hessian_discrepancy_diagnostic(const CostFunctional& F,
                                                        const SolveResult& phi_alpha,
                                                        const Vec& phi_true,
                                                        double delta,
                                                        double cost_hessian_lipschitz) {
  if (!(cost_hessian_lipschitz > 0.0)) {
    throw std::invalid_argument("HessianLipschitzZero");
  }
  HessianDiscrepancyReport rep;
  rep.cost_hessian_lipschitz = cost_hessian_lipschitz;
  rep.tau_lh = tau_of_hessian_lipschitz(cost_hessian_lipschitz,
                                        F.op.largest_singular_value());
  rep.discrepancy = (F.op.apply(phi_alpha.minimizer) - F.data).norm();
  rep.main_term = delta * rep.tau_lh;
  const double dist2 = (phi_alpha.minimizer - phi_true).squaredNorm();
  rep.remainder = std::sqrt(2.0 * cost_hessian_lipschitz * dist2);
  rep.slack = rep.main_term + rep.remainder - rep.discrepancy;
  rep.holds = rep.slack >= 0.0;
  return rep;
}

}  // namespace convreg
