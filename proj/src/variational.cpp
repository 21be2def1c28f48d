#include "convreg/variational.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace convreg {

double CostFunctional::misfit(const Vec& x) const {
  return 0.5 * (op.apply(x) - data).squaredNorm();
}

double CostFunctional::value(const Vec& x) const {
  return misfit(x) + alpha * penalty.value(x);
}

Vec CostFunctional::gradient(const Vec& x) const {
  return op.apply_adjoint(op.apply(x) - data) + alpha * penalty.gradient(x);
}

namespace {

// ||T*(f - T phi) - alpha grad J(phi)||, assembled term by term rather than
// through CostFunctional::gradient so it certifies the result independently.
double optimality_residual_of(const CostFunctional& F, const Vec& x) {
  Vec lhs = F.op.apply_adjoint(F.data - F.op.apply(x));
  Vec rhs = F.alpha * F.penalty.gradient(x);
  return (lhs - rhs).norm();
}

// Hessian of F at x applied to v: T*T v + alpha * hess J(x) v.
Vec cost_hessian_vec(const CostFunctional& F, const Vec& x, const Vec& v) {
  return F.op.apply_adjoint(F.op.apply(v)) + F.alpha * F.penalty.hessian_vec(x, v);
}

// Conjugate gradients on H(x) d = -g for the local Newton model. Stops when
// the linear residual falls below rel_tol * ||g|| or at max_iter.
Vec newton_direction_cg(const CostFunctional& F, const Vec& x, const Vec& g,
                        double rel_tol, int max_iter) {
  Vec d = Vec::Zero(x.size());
  Vec r = -g;  // residual of H d + g at d = 0
  Vec p = r;
  double rs = r.squaredNorm();
  const double stop = rel_tol * rel_tol * g.squaredNorm();
  for (int it = 0; it < max_iter && rs > stop; ++it) {
    Vec hp = cost_hessian_vec(F, x, p);
    const double ph = p.dot(hp);
    if (!(ph > 0.0)) break;  // nonpositive curvature, keep current d
    const double a = rs / ph;
    d += a * p;
    r -= a * hp;
    const double rs_next = r.squaredNorm();
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }
  return d;
}

}  // namespace

SolveResult solve(const CostFunctional& F, const SolveConfig& cfg) {
  if (!(cfg.grad_tol > 0.0)) throw std::invalid_argument("solve: grad_tol must be positive");
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0)) {
    throw std::invalid_argument("solve: shrink factor must lie in (0,1)");
  }
  if (F.data.size() != F.op.range_dim()) {
    throw std::invalid_argument("solve: data dimension does not match operator range");
  }

  Vec x = cfg.init ? *cfg.init : Vec::Zero(F.op.domain_dim());
  if (x.size() != F.op.domain_dim()) {
    throw std::invalid_argument("solve: init dimension does not match operator domain");
  }

  double fx = F.value(x);
  if (!std::isfinite(fx)) throw std::runtime_error("solve: objective not finite at init");

  // Monotone FISTA: x is the monotone incumbent, z the accelerated sequence.
  // z-steps that fail to beat the incumbent still feed the momentum; the
  // momentum is reset when the z-objective rises (adaptive restart).
  Vec x_old = x;
  Vec z = x;
  double t = 1.0, t_prev = 1.0;
  double fz_prev = std::numeric_limits<double>::infinity();
  double step = cfg.initial_step;
  const double min_step = 1e-18;
  int no_improve = 0;

  SolveResult res;
  bool stagnated = false;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    Vec gx = F.gradient(x);
    const double gn = gx.norm();
    if (gn <= cfg.grad_tol) {
      const double resid = optimality_residual_of(F, x);
      if (resid <= cfg.grad_tol) {
        res.converged = true;
        res.grad_norm = gn;
        res.optimality_residual = resid;
        break;
      }
      // keep iterating until both routes certify stationarity
    }

    Vec y = x + (t_prev / t) * (z - x) + ((t_prev - 1.0) / t) * (x - x_old);
    Vec gy = F.gradient(y);
    double fy = F.value(y);
    if (!std::isfinite(fy)) {  // extrapolation left the finite region
      y = x;
      gy = gx;
      fy = fx;
      t = t_prev = 1.0;
      z = x;
    }

    // Backtrack until the quadratic majorization holds (decrease s/2 ||g||^2,
    // which implies the configured Armijo condition for any constant <= 1/2);
    // steps beyond the majorization bound make the momentum oscillate.
    const double decrease = std::max(cfg.sufficient_decrease, 0.5);
    double s = step;
    Vec z_new;
    double fz;
    bool ls_ok = false;
    while (true) {
      z_new = y - s * gy;
      fz = F.value(z_new);
      if (std::isnan(fz)) throw std::runtime_error("solve: diverged line search (NaN objective)");
      if (fz <= fy - decrease * s * gy.squaredNorm()) {
        ls_ok = true;
        break;
      }
      s *= cfg.shrink;
      if (s < min_step) break;
    }

    const bool improved = ls_ok && fz < fx;
    if (improved) {
      x_old = x;
      x = z_new;
      fx = fz;
      no_improve = 0;
    } else {
      ++no_improve;
    }

    if (no_improve >= 30) {
      // The objective can no longer resolve progress: the true per-step
      // decrease ~ s/2 ||g||^2 has fallen below its rounding noise, around
      // ||g|| ~ sqrt(eps |F| / s). Finish with a Newton-CG step accepted on
      // gradient contraction; near the minimizer it converges quadratically
      // and has no objective noise floor. The next pass re-checks
      // convergence and lands back here if another step is needed.
      Vec d = newton_direction_cg(F, x, gx, 0.05, 4 * int(x.size()) + 200);
      bool polished = false;
      double scale = 1.0;
      for (int backoff = 0; backoff < 30; ++backoff) {
        Vec trial = x + scale * d;
        const double f_trial = F.value(trial);
        if (std::isnan(f_trial)) {
          throw std::runtime_error("solve: diverged line search (NaN objective)");
        }
        Vec g_trial = F.gradient(trial);
        if (std::isfinite(f_trial) && g_trial.norm() < gn) {
          x_old = x;
          x = std::move(trial);
          fx = f_trial;
          polished = true;
          break;
        }
        scale *= 0.5;
      }
      if (!polished) {
        stagnated = true;
        break;
      }
      z = x;
      t = t_prev = 1.0;
      fz_prev = std::numeric_limits<double>::infinity();
      no_improve = 0;
      if (cfg.on_iterate) cfg.on_iterate(it + 1, fx, gn);
      continue;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (improved) {
      z = std::move(z_new);
      t_prev = t;
      t = t_next;
    } else {
      x_old = x;  // incumbent frozen; momentum continues through z
      z = std::move(z_new);
      t_prev = t;
      t = t_next;
    }
    if (fz > fz_prev) {  // adaptive restart on objective increase along z
      t = t_prev = 1.0;
      z = x;
      fz_prev = std::numeric_limits<double>::infinity();
    } else {
      fz_prev = fz;
    }
    step = s * 1.25;  // mild growth keeps s near the majorization edge
    if (cfg.on_iterate) cfg.on_iterate(it + 1, fx, gn);
  }

  if (it >= cfg.max_iter || stagnated) {
    Vec g = F.gradient(x);
    const double gn = g.norm();
    const double resid = optimality_residual_of(F, x);
    res.converged = gn <= cfg.grad_tol && resid <= cfg.grad_tol;
    res.grad_norm = gn;
    res.optimality_residual = resid;
  }

  res.minimizer = std::move(x);
  res.iterations = it;
  res.objective = fx;
  return res;
}

Vec closed_form_tikhonov(const ForwardOperator& op, const Vec& f_delta, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("closed_form_tikhonov: alpha must be positive");
  if (f_delta.size() != op.range_dim()) {
    throw std::invalid_argument("closed_form_tikhonov: data dimension mismatch");
  }
  if (op.kind() == OperatorKind::Diagonal) {
    const Vec& s = op.singular_values();
    Vec phi(s.size());
    for (Index i = 0; i < s.size(); ++i) {
      phi[i] = s[i] * f_delta[i] / (s[i] * s[i] + alpha);
    }
    return phi;
  }
  if (op.kind() == OperatorKind::Dense) {
    if (op.domain_dim() > 512) {
      throw std::invalid_argument("closed_form_tikhonov: dimension above 512");
    }
    const Mat a = op.to_dense();
    Mat normal = a.transpose() * a;
    normal.diagonal().array() += alpha;
    return Eigen::LLT<Mat>(normal).solve(a.transpose() * f_delta);
  }
  throw std::invalid_argument("closed_form_tikhonov: operator must be Diagonal or Dense");
}

}  // namespace convreg
