#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "convreg/experiments.hpp"

using namespace convreg;

namespace {

struct CheckPrinter {
  bool all_ok = true;
  void operator()(bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
    all_ok = all_ok && ok;
  }
};

int run_rate_study_command(const std::string& problem, int n, double decay,
                           double width, const std::string& profile,
                           const std::string& penalty_name, double mu, double eps,
                           double radius, const std::string& rule_name, double tau,
                           double p, std::vector<double> deltas, std::uint64_t seed,
                           int repeats, bool search, const std::string& out,
                           const std::string& format, double grad_tol, int max_iter) {
  Penalty penalty = Penalty::by_name(penalty_name, mu, eps, radius);

  ProblemInstance prob = problem == "diagonal"
                             ? make_diagonal_problem(n, decay, profile, penalty)
                             : make_blur_problem(n, width, penalty);

  // ||T*|| for the parameter rules comes from the power-iteration estimate
  auto norm_est = operator_norm(prob.op, 1e-12, 100000, seed ^ 0x9e3779b97f4a7c15ULL);
  if (!norm_est.converged) {
    std::fprintf(stderr, "operator norm estimation did not converge (residual %g)\n",
                 norm_est.residual);
    return 1;
  }
  const double opnorm = norm_est.value;

  ParamRule rule;
  if (rule_name == "sqrt") {
    rule = ParamRule::sqrt_rule(tau, opnorm);
  } else if (rule_name == "power") {
    rule = ParamRule::power_rule(p);
  } else {
    rule = ParamRule::hessian_sqrt_rule(penalty.hessian_lipschitz(), opnorm);
  }

  SolveConfig cfg;
  cfg.grad_tol = grad_tol;
  cfg.max_iter = max_iter;

  RateStudyResult result = run_rate_study(prob, rule, deltas, cfg, seed, repeats, search);
  emit_report(result, format == "csv" ? ReportFormat::Csv : ReportFormat::Json, out);

  std::printf("wrote %s (%zu rows; slopes: error %.4f, d_j %.4f, d_g %.4f)\n",
              out.c_str(), result.rows.size(), result.fitted_slopes.error_vs_delta,
              result.fitted_slopes.d_j_vs_delta, result.fitted_slopes.d_g_vs_delta);
  if (!result.error_trend_monotone) {
    std::fprintf(stderr, "note: error_norm is not monotone across the grid\n");
  }
  return 0;
}

int run_verify_bregman() {
  CheckPrinter check;
  Rng rng(101);
  Vec sv(16);
  for (Index i = 0; i < 16; ++i) sv[i] = std::pow(double(i + 1), -1.0);
  auto op = ForwardOperator::diagonal(sv);
  auto quad = Penalty::quadratic();
  Functional qval = [&](const Vec& x) { return quad.value(x); };
  FunctionalGradient qgrad = [&](const Vec& x) { return quad.gradient(x); };

  bool closed_forms = true, nonneg = true, sym_agree = true;
  for (int trial = 0; trial < 100; ++trial) {
    Vec u = rng.normal_vec(16);
    Vec v = rng.normal_vec(16);
    const double dj = bregman(qval, qgrad, u, v);
    const double djs = bregman_sym(qval, qgrad, u, v);
    const double dg = bregman_misfit(op, Vec::Zero(16), u, v);
    closed_forms = closed_forms &&
                   std::abs(dj - 0.5 * (u - v).squaredNorm()) <= 1e-10 &&
                   std::abs(djs - (u - v).squaredNorm()) <= 1e-10 &&
                   std::abs(dg - 0.5 * op.apply(u - v).squaredNorm()) <= 1e-10;
    nonneg = nonneg && dj >= -1e-12 && djs >= -1e-12 && dg >= -1e-12;
    sym_agree = sym_agree && std::abs(dj + bregman(qval, qgrad, v, u) - djs) <=
                                 1e-12 * (1.0 + std::abs(djs));
  }
  check(closed_forms, "quadratic and misfit divergences match their closed forms");
  check(nonneg, "divergences of convex functionals are nonnegative");
  check(sym_agree, "sum and inner-product routes agree");

  bool identity_ok = true;
  for (int k = 0; k < 10; ++k) {
    Vec phi_true = rng.normal_vec(16);
    Vec f_delta = inject_noise(op.apply(phi_true), {1e-2, 500 + std::uint64_t(k)});
    const double alpha = 0.05 * (k + 1);
    CostFunctional F{op, f_delta, alpha, quad};
    Vec phi = closed_form_tikhonov(op, f_delta, alpha);
    identity_ok = identity_ok && sym_identity_check(F, phi, phi_true) <= 1e-8;
  }
  check(identity_ok, "stationarity identity residual <= 1e-8 at closed-form minimizers");
  return check.all_ok ? 0 : 1;
}

int run_verify_optimality() {
  CheckPrinter check;
  bool oracle = true, optimality = true, unique = true;
  for (int k = 0; k < 20; ++k) {
    const Index n = 4 + (k % 5) * 8;
    Rng mk(700 + k);
    Vec sv(n);
    for (Index i = 0; i < n; ++i) sv[i] = mk.uniform(0.1, 2.0);
    std::sort(sv.data(), sv.data() + n, std::greater<double>());
    auto op = ForwardOperator::diagonal(sv);
    Vec f = mk.normal_vec(n);
    const double alpha = mk.uniform(0.1, 2.0);
    CostFunctional F{op, f, alpha, Penalty::quadratic()};
    SolveConfig cfg;
    cfg.grad_tol = 1e-10;
    SolveResult sol = solve(F, cfg);
    oracle = oracle && sol.converged &&
             (sol.minimizer - closed_form_tikhonov(op, f, alpha)).norm() <= 1e-8;
    optimality = optimality && sol.optimality_residual <= 1e-9;

    SolveConfig other = cfg;
    other.init = mk.normal_vec(n);
    SolveResult sol2 = solve(F, other);
    unique = unique && sol2.converged &&
             (sol.minimizer - sol2.minimizer).norm() <= 1e-7;
  }
  check(oracle, "solve matches closed_form_tikhonov to 1e-8 on 20 instances");
  check(optimality, "||T*(f - T phi) - alpha grad J(phi)|| <= 1e-9 at every solution");
  check(unique, "independent initializations agree to 1e-7");
  return check.all_ok ? 0 : 1;
}

int run_verify_lemmas() {
  CheckPrinter check;
  auto penalty = Penalty::pseudo_huber_strong(1.0, 0.1);
  auto prob = make_diagonal_problem(32, 1.0, "smooth", penalty);
  auto rule = ParamRule::sqrt_rule(1.0, prob.op.largest_singular_value());
  SolveConfig cfg;
  cfg.grad_tol = 1e-10;
  auto res = run_rate_study(prob, rule, {1e-1, 1e-2, 1e-3, 1e-4}, cfg, 3, 1, true);
  bool residual1 = true, weak = true;
  for (const auto& d : res.details) {
    residual1 = residual1 && d.residual_bound.holds;
    weak = weak && d.weak_convergence.holds;
  }
  check(residual1, "residual bound holds on every study row");
  check(weak, "weak-convergence inequality holds on every study row");

  const bool tau_ok =
      std::abs(tau_of_hessian_lipschitz(1.0, 1.0) - std::sqrt(2.0)) <= 1e-9 &&
      std::abs(tau_of_hessian_lipschitz(3.0, 1.0) - 2.0 / std::sqrt(3.0)) <= 1e-9 &&
      std::abs(tau_of_hessian_lipschitz(1e12, 1.0) - 1.0) <= 1e-9;
  check(tau_ok, "tau(L_H) reproduces the tabulated values");

  bool monotone = true;
  for (const auto& r : {ParamRule::sqrt_rule(1.0, 1.0), ParamRule::power_rule(1.0),
                        ParamRule::hessian_sqrt_rule(2.0, 1.0)}) {
    double prev = 0.0;
    for (double delta = 1e-8; delta <= 1.0; delta *= 10.0) {
      monotone = monotone && r.alpha(delta) > prev;
      prev = r.alpha(delta);
    }
  }
  check(monotone, "every rule is strictly increasing in delta");
  return check.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex variational regularization laboratory"};
  app.require_subcommand(1);

  // rate-study
  auto* study = app.add_subcommand("rate-study", "run a delta-sweep rate study");
  std::string problem = "diagonal", profile = "smooth", penalty_name = "pseudo-huber-strong";
  std::string rule_name = "sqrt", out_path, format = "csv";
  int n = 64, repeats = 1, max_iter = 200000;
  double decay = 1.0, width = 2.0, mu = 1.0, eps = 0.1, radius = 10.0;
  double tau = 1.0, p = 1.0, grad_tol = 1e-10;
  std::uint64_t seed = 1;
  bool search = false;
  std::string deltas_csv = "1e-1,3e-2,1e-2,3e-3,1e-3,3e-4,1e-4";
  study->add_option("--problem", problem)->check(CLI::IsMember({"diagonal", "blur"}));
  study->add_option("--n", n);
  study->add_option("--decay", decay);
  study->add_option("--width", width);
  study->add_option("--profile", profile);
  study->add_option("--penalty", penalty_name)
      ->check(CLI::IsMember({"quadratic", "pseudo-huber-strong", "quartic-strong"}));
  study->add_option("--mu", mu);
  study->add_option("--eps", eps);
  study->add_option("--radius", radius);
  study->add_option("--rule", rule_name)
      ->check(CLI::IsMember({"sqrt", "power", "hessian-sqrt"}));
  study->add_option("--tau", tau);
  study->add_option("--p", p);
  study->add_option("--deltas", deltas_csv, "comma-separated, strictly decreasing");
  study->add_option("--seed", seed);
  study->add_option("--repeats", repeats);
  study->add_option("--discrepancy-search", search);
  study->add_option("--out", out_path)->required();
  study->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  study->add_option("--grad-tol", grad_tol);
  study->add_option("--max-iter", max_iter);

  // verify
  auto* verify = app.add_subcommand("verify", "run an invariant suite");
  std::string suite;
  verify->add_option("--suite", suite)
      ->required()
      ->check(CLI::IsMember({"bregman", "optimality", "lemmas"}));

  // tau
  auto* tau_cmd = app.add_subcommand("tau", "print tau(L_H)");
  double lh = 0.0, opnorm = 1.0;
  tau_cmd->add_option("--lh", lh)->required();
  tau_cmd->add_option("--opnorm", opnorm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (study->parsed()) {
      std::vector<double> deltas;
      for (const auto& tok : CLI::detail::split(deltas_csv, ',')) {
        deltas.push_back(std::stod(tok));
      }
      return run_rate_study_command(problem, n, decay, width, profile, penalty_name,
                                    mu, eps, radius, rule_name, tau, p, deltas, seed,
                                    repeats, search, out_path, format, grad_tol,
                                    max_iter);
    }
    if (verify->parsed()) {
      if (suite == "bregman") return run_verify_bregman();
      if (suite == "optimality") return run_verify_optimality();
      return run_verify_lemmas();
    }
    if (tau_cmd->parsed()) {
      if (!(lh > 0.0)) {
        std::fprintf(stderr, "HessianLipschitzZero: tau(L_H) is undefined for L_H = 0; "
                             "supply a fixed tau instead\n");
        return 2;
      }
      std::printf("%.17g\n", tau_of_hessian_lipschitz(lh, opnorm));
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
