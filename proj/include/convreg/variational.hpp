#pragma once

#include <functional>
#include <optional>

#include "convreg/operators.hpp"
#include "convreg/penalties.hpp"
#include "convreg/types.hpp"

namespace convreg {

/// The cost functional 1/2 ||T phi - f||^2 + alpha J(phi).
struct CostFunctional {
  ForwardOperator op;
  Vec data;      // noisy right-hand side f
  double alpha;  // regularization weight, > 0 (0 allowed for pure misfit)
  Penalty penalty;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  /// 1/2 ||T x - f||^2 alone.
  double misfit(const Vec& x) const;
};

struct SolveConfig {
  double grad_tol = 1e-9;
  int max_iter = 50000;
  double initial_step = 1.0;
  double shrink = 0.5;               // backtracking factor, in (0,1)
  double sufficient_decrease = 1e-4; // Armijo constant
  std::optional<Vec> init;           // default: zero vector
  /// Optional per-accepted-iterate hook (iteration, objective, grad norm).
  std::function<void(int, double, double)> on_iterate;
};

struct SolveResult {
  Vec minimizer;
  int iterations = 0;
  double grad_norm = 0.0;
  /// ||T*(f - T phi) - alpha grad J(phi)||, recomputed independently of the
  /// solver's own gradient; equals grad_norm up to rounding.
  double optimality_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
};

/// Minimizes F with Nesterov-accelerated gradient descent, backtracking line
/// search, and restart on objective increase. The objective is nonincreasing
/// across accepted iterates. Returns once both the gradient norm and the
/// independently recomputed optimality residual are <= grad_tol; exceeding
/// max_iter returns the best iterate flagged non-converged. A NaN objective
/// throws (diverged line search).
SolveResult solve(const CostFunctional& F, const SolveConfig& cfg = {});

/// Direct solve of (T*T + alpha I) phi = T* f, the exact minimizer for the
/// quadratic penalty. Diagonal or Dense operators with dimension <= 512.
Vec closed_form_tikhonov(const ForwardOperator& op, const Vec& f_delta,
                         double alpha);

}  // namespace convreg
