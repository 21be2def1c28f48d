#include "convreg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace convreg {

ProblemInstance make_diagonal_problem(int n, double decay,
                                      const std::string& profile,
                                      const Penalty& penalty) {
  if (n < 2) throw std::invalid_argument("make_diagonal_problem: n must be >= 2");
  if (decay < 0.0) throw std::invalid_argument("make_diagonal_problem: decay must be >= 0");

  Vec sigma(n);
  for (int i = 0; i < n; ++i) sigma[i] = std::pow(static_cast<double>(i + 1), -decay);

  Vec phi = Vec::Zero(n);
  if (profile == "smooth") {
    for (int i = 0; i < n; ++i) phi[i] = 1.0 / (i + 1);
  } else if (profile == "supersmooth") {
    for (int i = 0; i < n; ++i) phi[i] = std::pow(static_cast<double>(i + 1), -3.0);
  } else if (profile == "zero") {
    // keep zeros
  } else {
    throw std::invalid_argument("make_diagonal_problem: unknown profile '" + profile + "'");
  }

  ProblemInstance prob{ForwardOperator::diagonal(std::move(sigma)), phi, Vec(),
                       penalty, "diagonal", profile, decay, 0.0};
  prob.f_true = prob.op.apply(prob.phi_true);
  return prob;
}

ProblemInstance make_blur_problem(int n, double width, const Penalty& penalty) {
  if (n < 8) throw std::invalid_argument("make_blur_problem: n must be >= 8");
  if (!(width > 0.0)) throw std::invalid_argument("make_blur_problem: width must be positive");

  const Index r = static_cast<Index>(std::ceil(4.0 * width));
  Vec kernel(2 * r + 1);
  for (Index j = -r; j <= r; ++j) {
    const double t = static_cast<double>(j) / width;
    kernel[j + r] = std::exp(-0.5 * t * t);
  }
  kernel /= kernel.sum();

  // piecewise-smooth profile: a C-infinity bump plus a sin^2 hump
  Vec phi = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    if (t > 0.2 && t < 0.5) {
      const double s = (t - 0.35) / 0.15;
      if (s * s < 1.0) phi[i] += std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    if (t > 0.6 && t < 0.9) {
      const double s = std::sin(M_PI * (t - 0.6) / 0.3);
      phi[i] += 0.8 * s * s;
    }
  }

  ProblemInstance prob{ForwardOperator::convolution(std::move(kernel), n), phi,
                       Vec(), penalty, "blur", "", 0.0, width};
  prob.f_true = prob.op.apply(prob.phi_true);
  return prob;
}

Vec inject_noise(const Vec& f_true, const NoiseModel& model) {
  if (model.delta < 0.0) throw std::invalid_argument("inject_noise: delta must be >= 0");
  if (model.delta == 0.0) return f_true;
  Rng rng(model.seed);
  Vec g = rng.normal_vec(f_true.size());
  while (g.norm() == 0.0) g = rng.normal_vec(f_true.size());  // probability-zero guard
  Vec fd = f_true + (model.delta / g.norm()) * g;
  // Rescale against the realized difference so the measured noise norm equals
  // delta as closely as the additions to f_true allow; each component of
  // f_true + delta e quantizes at its own ulp, which bounds the achievable
  // accuracy when delta << ||f_true||.
  Vec best = fd;
  double best_err = std::abs((fd - f_true).norm() - model.delta);
  for (int pass = 0; pass < 4 && best_err != 0.0; ++pass) {
    Vec diff = fd - f_true;
    const double achieved = diff.norm();
    if (achieved == 0.0) break;
    fd = f_true + (model.delta / achieved) * diff;
    const double err = std::abs((fd - f_true).norm() - model.delta);
    if (err < best_err) {
      best = fd;
      best_err = err;
    }
  }
  return best;
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) continue;
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) {
    throw std::invalid_argument("fit_loglog_slope: fewer than 2 positive points");
  }
  const double denom = sxx - sx * sx / m;
  if (denom == 0.0) {
    throw std::invalid_argument("fit_loglog_slope: degenerate abscissae");
  }
  return (sxy - sx * sy / m) / denom;
}

namespace {

double slope_or_nan(const std::vector<std::pair<double, double>>& pts) {
  try {
    return fit_loglog_slope(pts);
  } catch (const std::invalid_argument&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double geometric_mean(const std::vector<double>& xs) {
  bool all_positive = true;
  for (double x : xs) all_positive = all_positive && x > 0.0;
  if (!all_positive) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / xs.size();
  }
  double s = 0.0;
  for (double x : xs) s += std::log(x);
  return std::exp(s / xs.size());
}

double arithmetic_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / xs.size();
}

}  // namespace

RateStudyResult run_rate_study(const ProblemInstance& problem, const ParamRule& rule,
                               const std::vector<double>& delta_grid,
                               const SolveConfig& cfg, std::uint64_t seed,
                               int repeats, bool use_discrepancy_search) {
  if (delta_grid.size() < 4) {
    throw std::invalid_argument("run_rate_study: need at least 4 delta values");
  }
  for (size_t i = 0; i < delta_grid.size(); ++i) {
    if (!(delta_grid[i] > 0.0)) {
      throw std::invalid_argument("run_rate_study: deltas must be positive");
    }
    if (i > 0 && !(delta_grid[i] < delta_grid[i - 1])) {
      throw std::invalid_argument("run_rate_study: deltas must be strictly decreasing");
    }
  }
  if (repeats < 1) throw std::invalid_argument("run_rate_study: repeats must be >= 1");

  const double tau = rule.admissibility_tau();
  const double curvature_of_alpha = 2.0 * problem.penalty.convexity_modulus2();

  RateStudyResult result;
  result.rows.reserve(delta_grid.size());

  for (size_t k = 0; k < delta_grid.size(); ++k) {
    const double delta = delta_grid[k];
    std::vector<StudyRow> reps;

    for (int rep = 0; rep < repeats; ++rep) {
      const std::uint64_t row_seed =
          seed + static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(repeats) +
          static_cast<std::uint64_t>(rep);
      const Vec f_delta = inject_noise(problem.f_true, {delta, row_seed});

      double alpha = rule.alpha(delta);
      CostFunctional F{problem.op, f_delta, alpha, problem.penalty};
      SolveResult sol = solve(F, cfg);
      if (!sol.converged) {
        throw std::runtime_error("run_rate_study: solve did not converge at delta = " +
                                 std::to_string(delta));
      }
      AdmissibilityRecord rec = check_admissible(problem.op, f_delta, sol, tau, delta,
                                                 alpha * curvature_of_alpha);
      bool used_fallback = false;
      if (!rec.admissible && use_discrepancy_search) {
        // expand downward for an admissible bracket endpoint, then bisect
        double lo = alpha;
        double hi = alpha;
        bool bracketed = false;
        for (int expand = 0; expand < 16; ++expand) {
          hi = lo;
          lo /= 10.0;
          CostFunctional Flo{problem.op, f_delta, lo, problem.penalty};
          SolveResult sol_lo = solve(Flo, cfg);
          if (!sol_lo.converged) {
            throw std::runtime_error(
                "run_rate_study: fallback solve did not converge at delta = " +
                std::to_string(delta));
          }
          AdmissibilityRecord rec_lo = check_admissible(
              problem.op, f_delta, sol_lo, tau, delta, lo * curvature_of_alpha);
          if (rec_lo.admissible) {
            bracketed = true;
            break;
          }
        }
        if (!bracketed) {
          throw std::runtime_error(
              "run_rate_study: no admissible alpha found above " + std::to_string(lo) +
              " at delta = " + std::to_string(delta));
        }
        DiscrepancySearchResult found =
            discrepancy_search(problem.op, f_delta, problem.penalty, tau, delta, lo,
                               hi, 0.01, cfg);
        alpha = found.alpha;
        F.alpha = alpha;
        sol = std::move(found.solution);
        rec = found.record;
        used_fallback = true;
      }

      BregmanReport breg = bregman_report(F, sol, problem.phi_true);

      StudyRow row;
      row.delta = delta;
      row.alpha = alpha;
      row.admissible = rec.admissible;
      row.used_fallback = used_fallback;
      row.discrepancy = rec.discrepancy;
      row.error_norm = (sol.minimizer - problem.phi_true).norm();
      row.d_j = breg.d_j;
      row.d_j_sym = breg.d_j_sym;
      row.d_g = breg.d_g;
      row.d_f = breg.d_f;
      row.sym_residual = breg.sym_identity_residual;
      reps.push_back(row);

      StudyRowDetail detail;
      detail.row = static_cast<int>(k);
      detail.repeat = rep;
      detail.f_delta = f_delta;
      detail.residual_bound =
          residual_bound_check(problem.op, sol.minimizer, problem.phi_true, f_delta, delta);
      detail.weak_convergence = weak_convergence_check(F, sol, problem.phi_true, delta);
      detail.solution = std::move(sol);
      detail.values = row;
      result.details.push_back(std::move(detail));
    }

    StudyRow row = reps.front();
    if (repeats > 1) {
      auto collect = [&](auto member) {
        std::vector<double> xs;
        xs.reserve(reps.size());
        for (const auto& r : reps) xs.push_back(r.*member);
        return xs;
      };
      row.alpha = geometric_mean(collect(&StudyRow::alpha));
      row.discrepancy = geometric_mean(collect(&StudyRow::discrepancy));
      row.error_norm = geometric_mean(collect(&StudyRow::error_norm));
      row.d_j = geometric_mean(collect(&StudyRow::d_j));
      row.d_j_sym = geometric_mean(collect(&StudyRow::d_j_sym));
      row.d_g = geometric_mean(collect(&StudyRow::d_g));
      row.d_f = arithmetic_mean(collect(&StudyRow::d_f));
      row.sym_residual = arithmetic_mean(collect(&StudyRow::sym_residual));
      row.admissible = std::all_of(reps.begin(), reps.end(),
                                   [](const StudyRow& r) { return r.admissible; });
      row.used_fallback = std::any_of(reps.begin(), reps.end(),
                                      [](const StudyRow& r) { return r.used_fallback; });
    }
    result.rows.push_back(row);
  }

  std::vector<std::pair<double, double>> err_pts, dj_pts, dg_pts;
  for (const auto& r : result.rows) {
    err_pts.emplace_back(r.delta, r.error_norm);
    dj_pts.emplace_back(r.delta, r.d_j);
    dg_pts.emplace_back(r.delta, r.d_g);
  }
  result.fitted_slopes.error_vs_delta = slope_or_nan(err_pts);
  result.fitted_slopes.d_j_vs_delta = slope_or_nan(dj_pts);
  result.fitted_slopes.d_g_vs_delta = slope_or_nan(dg_pts);

  result.error_trend_monotone = true;
  for (size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].error_norm >
        result.rows[i - 1].error_norm * (1.0 + 1e-12)) {
      result.error_trend_monotone = false;
      break;
    }
  }

  result.config.rule = rule.kind_name();
  result.config.tau = rule.tau;
  result.config.p = rule.p;
  result.config.rule_hessian_lipschitz = rule.hessian_lipschitz;
  result.config.opnorm = rule.opnorm;
  result.config.deltas = delta_grid;
  result.config.seed = seed;
  result.config.repeats = repeats;
  result.config.discrepancy_search = use_discrepancy_search;
  result.config.grad_tol = cfg.grad_tol;
  result.config.max_iter = cfg.max_iter;
  result.config.problem = problem.name;
  result.config.profile = problem.profile;
  result.config.decay = problem.decay;
  result.config.width = problem.width;
  result.config.n = static_cast<int>(problem.op.domain_dim());
  result.config.penalty = problem.penalty.name();
  result.config.mu = problem.penalty.mu();
  result.config.eps = problem.penalty.eps();
  result.config.radius = problem.penalty.declared_radius();

  return result;
}

}  // namespace convreg
