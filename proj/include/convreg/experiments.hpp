#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "convreg/regparam.hpp"

namespace convreg {

struct ProblemInstance {
  ForwardOperator op;
  Vec phi_true;
  Vec f_true;  // = T phi_true
  Penalty penalty;
  std::string name;
  // generator echo, carried through to reports
  std::string profile;
  double decay = 0.0;
  double width = 0.0;
};

/// Diagonal operator with singular values sigma_i = i^{-decay} and a named
/// true-solution profile: "smooth" (phi_i = 1/i), "supersmooth" (phi_i = 1/i^3),
/// or "zero".
ProblemInstance make_diagonal_problem(int n, double decay,
                                      const std::string& profile,
                                      const Penalty& penalty);

/// One-dimensional deconvolution: normalized Gaussian kernel of the given
/// width (zero-padded boundaries) against a piecewise-smooth bump profile.
ProblemInstance make_blur_problem(int n, double width, const Penalty& penalty);

struct NoiseModel {
  double delta = 0.0;
  std::uint64_t seed = 0;
};

/// f_delta = f_true + delta * g / ||g|| with g a seeded standard-normal draw,
/// so ||f_delta - f_true|| = delta exactly.
Vec inject_noise(const Vec& f_true, const NoiseModel& model);

/// Least-squares slope of log y against log x. Points with non-positive
/// coordinates are excluded; fewer than 2 surviving points is an error.
double fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

struct StudyRow {
  double delta = 0.0;
  double alpha = 0.0;
  bool admissible = false;
  bool used_fallback = false;  // alpha replaced by discrepancy search
  double discrepancy = 0.0;
  double error_norm = 0.0;
  double d_j = 0.0;
  double d_j_sym = 0.0;
  double d_g = 0.0;
  double d_f = 0.0;
  double sym_residual = 0.0;
};

/// Per-solve detail retained for invariant checks; not serialized.
struct StudyRowDetail {
  int row = 0;
  int repeat = 0;
  Vec f_delta;
  SolveResult solution;
  InequalityCheck residual_bound;
  InequalityCheck weak_convergence;
  StudyRow values;  // un-aggregated row for this repeat
};

struct RateStudyConfig {
  std::string problem;   // "diagonal" | "blur"
  std::string profile;   // diagonal only
  int n = 0;
  double decay = 0.0;    // diagonal only
  double width = 0.0;    // blur only
  std::string penalty;
  double mu = 0.0;
  double eps = 0.0;
  double radius = 0.0;
  std::string rule;
  double tau = 0.0;
  double p = 0.0;
  double rule_hessian_lipschitz = 0.0;
  double opnorm = 0.0;
  std::vector<double> deltas;
  std::uint64_t seed = 0;
  int repeats = 1;
  bool discrepancy_search = false;
  double grad_tol = 0.0;
  int max_iter = 0;
};

struct FittedSlopes {
  // NaN when fewer than two rows carry positive values.
  double error_vs_delta = 0.0;
  double d_j_vs_delta = 0.0;
  double d_g_vs_delta = 0.0;
};

struct RateStudyResult {
  std::vector<StudyRow> rows;  // sorted by decreasing delta
  FittedSlopes fitted_slopes;
  RateStudyConfig config;
  bool error_trend_monotone = false;
  std::vector<StudyRowDetail> details;  // one per (row, repeat)
};

/// Runs the delta sweep: per delta, inject exact-norm noise, pick alpha via
/// the rule, solve, and fill the row with discrepancy/error/Bregman
/// diagnostics and admissibility. When use_discrepancy_search is set, rows
/// whose rule alpha is not admissible fall back to the largest admissible
/// alpha found by bisection and are flagged. Any non-converged solve aborts
/// the study. The noise generator is seeded per (row, repeat), so row order
/// cannot change results. With repeats > 1, positive row quantities are
/// aggregated by geometric mean, admissibility by conjunction.
RateStudyResult run_rate_study(const ProblemInstance& problem, const ParamRule& rule,
                               const std::vector<double>& delta_grid,
                               const SolveConfig& cfg, std::uint64_t seed,
                               int repeats = 1, bool use_discrepancy_search = false);

enum class ReportFormat { Csv, Json };

/// Writes the study to disk. CSV columns are exactly
///   delta,alpha,admissible,discrepancy,error_norm,d_j,d_j_sym,d_g,d_f,sym_residual
/// JSON mirrors the rows (plus the fallback flag), the fitted slopes, and the
/// full config echo. All numbers carry 17 significant digits so parsing
/// reproduces them bit-exactly.
void emit_report(const RateStudyResult& result, ReportFormat format,
                 const std::string& path);

std::string report_to_string(const RateStudyResult& result, ReportFormat format);

}  // namespace convreg
