#include <doctest.h>

#include <cmath>

#include "convreg/variational.hpp"

using namespace convreg;

namespace {

Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
}

ForwardOperator identity_op(Index n) {
  return ForwardOperator::diagonal(Vec::Ones(n));
}

ForwardOperator seeded_diagonal(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vec sv(n);
  for (Index i = 0; i < n; ++i) sv[i] = rng.uniform(0.1, 2.0);
  std::sort(sv.data(), sv.data() + n, std::greater<double>());
  return ForwardOperator::diagonal(sv);
}

ForwardOperator seeded_dense(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Mat a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal() / std::sqrt(double(n));
  return ForwardOperator::dense(a);
}

}  // namespace

TEST_CASE("cost value assembles misfit plus weighted penalty") {
  CostFunctional F{identity_op(1), vec1(0.0), 1.0, Penalty::quadratic()};
  CHECK(F.value(vec1(2.0)) == 4.0);  // 1/2 * 4 + 1 * 2
}

TEST_CASE("cost vanishes when both terms vanish") {
  CostFunctional F{identity_op(2), Vec::Zero(2), 1.0, Penalty::quadratic()};
  CHECK(F.value(Vec::Zero(2)) == 0.0);
}

TEST_CASE("alpha = 0 reduces to the pure misfit") {
  Rng rng(4);
  CostFunctional F{seeded_dense(4, 3), rng.normal_vec(4), 0.0, Penalty::quadratic()};
  Vec x = rng.normal_vec(4);
  CHECK(F.value(x) == doctest::Approx(F.misfit(x)).epsilon(1e-15));
}

TEST_CASE("cost gradient closed form on the identity") {
  CostFunctional F{identity_op(1), vec1(0.0), 1.0, Penalty::quadratic()};
  CHECK(F.gradient(vec1(1.0))[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("cost gradient matches finite differences") {
  Rng rng(5);
  CostFunctional F{seeded_dense(5, 6), rng.normal_vec(5), 0.37,
                   Penalty::pseudo_huber_strong(1.0, 0.1)};
  for (int trial = 0; trial < 20; ++trial) {
    Vec x = rng.uniform_vec(5, -1.0, 1.0);
    Vec g = F.gradient(x);
    Vec fd(5);
    const double h = 1e-6;
    for (Index i = 0; i < 5; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      fd[i] = (F.value(xp) - F.value(xm)) / (2.0 * h);
    }
    CHECK((g - fd).norm() <= 1e-5 * (1.0 + g.norm()));
  }
}

TEST_CASE("gradient vanishes at the closed-form tikhonov solution") {
  auto op = seeded_diagonal(6, 7);
  Rng rng(8);
  Vec f = rng.normal_vec(6);
  CostFunctional F{op, f, 0.5, Penalty::quadratic()};
  Vec phi = closed_form_tikhonov(op, f, 0.5);
  CHECK(F.gradient(phi).norm() <= 1e-10);
}

TEST_CASE("closed-form tikhonov scalar cases") {
  auto op = identity_op(1);
  CHECK(closed_form_tikhonov(op, vec1(2.0), 1.0)[0] ==
        doctest::Approx(1.0).epsilon(1e-15));
  // alpha -> 0 recovers the noise-free solution
  CHECK(std::abs(closed_form_tikhonov(op, vec1(2.0), 1e-12)[0] - 2.0) <= 1e-11);
}

TEST_CASE("closed-form tikhonov per-component formula") {
  Vec sv(2);
  sv << 2.0, 1.0;
  auto op = ForwardOperator::diagonal(sv);
  Vec f(2);
  f << 2.0, 1.0;
  Vec phi = closed_form_tikhonov(op, f, 1.0);
  CHECK(phi[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(phi[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("closed-form tikhonov rejects convolution operators") {
  Vec kernel(3);
  kernel << 0.25, 0.5, 0.25;
  auto op = ForwardOperator::convolution(kernel, 8);
  CHECK_THROWS_AS(closed_form_tikhonov(op, Vec::Zero(8), 1.0), std::invalid_argument);
}

TEST_CASE("solve matches the closed-form oracle on 20 seeded instances") {
  SolveConfig cfg;
  cfg.grad_tol = 1e-11;
  for (int k = 0; k < 20; ++k) {
    const Index n = 4 + (k % 5) * 8;
    auto op = (k % 2 == 0) ? seeded_diagonal(n, 100 + k) : seeded_dense(n, 100 + k);
    Rng rng(200 + k);
    Vec f = rng.normal_vec(n);
    const double alpha = rng.uniform(0.1, 2.0);
    CostFunctional F{op, f, alpha, Penalty::quadratic()};
    SolveResult sol = solve(F, cfg);
    REQUIRE(sol.converged);
    Vec oracle = closed_form_tikhonov(op, f, alpha);
    CHECK((sol.minimizer - oracle).norm() <= 1e-8);
  }
}

TEST_CASE("zero data gives the zero minimizer") {
  for (const auto& p : {Penalty::quadratic(), Penalty::pseudo_huber_strong(1.0, 0.1),
                        Penalty::quartic_strong(1.0, 10.0)}) {
    CostFunctional F{seeded_diagonal(5, 9), Vec::Zero(5), 0.7, p};
    SolveResult sol = solve(F);
    REQUIRE(sol.converged);
    CHECK(sol.minimizer.norm() <= 1e-9);
  }
}

TEST_CASE("huge alpha crushes the minimizer norm") {
  Rng rng(10);
  CostFunctional F{seeded_diagonal(6, 11), rng.normal_vec(6), 1e12,
                   Penalty::pseudo_huber_strong(1.0, 0.1)};
  SolveResult sol = solve(F);
  REQUIRE(sol.converged);
  CHECK(sol.minimizer.norm() <= 1e-6);
}

TEST_CASE("objective is nonincreasing across accepted iterates") {
  Rng rng(12);
  CostFunctional F{seeded_dense(16, 13), rng.normal_vec(16), 0.05,
                   Penalty::pseudo_huber_strong(1.0, 0.1)};
  double last = std::numeric_limits<double>::infinity();
  SolveConfig cfg;
  cfg.on_iterate = [&](int, double obj, double) {
    // nonincreasing up to the solver's rounding allowance
    const double noise =
        8.0 * std::numeric_limits<double>::epsilon() * (std::abs(last) + std::abs(obj) + 1.0);
    CHECK(obj <= last + noise);
    last = std::min(last, obj);
  };
  SolveResult sol = solve(F, cfg);
  CHECK(sol.converged);
}

TEST_CASE("optimality residual certifies stationarity independently") {
  Rng rng(14);
  CostFunctional F{seeded_diagonal(8, 15), rng.normal_vec(8), 0.3,
                   Penalty::pseudo_huber_strong(1.0, 0.1)};
  SolveResult sol = solve(F);
  REQUIRE(sol.converged);
  CHECK(sol.grad_norm <= 1e-9);
  CHECK(sol.optimality_residual <= 1e-9);
  // recompute the residual from scratch
  Vec lhs = F.op.apply_adjoint(F.data - F.op.apply(sol.minimizer));
  Vec rhs = F.alpha * F.penalty.gradient(sol.minimizer);
  CHECK((lhs - rhs).norm() == doctest::Approx(sol.optimality_residual).epsilon(1e-9));
}

TEST_CASE("two initializations reach the same minimizer when strongly convex") {
  Rng rng(16);
  CostFunctional F{seeded_dense(10, 17), rng.normal_vec(10), 0.2,
                   Penalty::pseudo_huber_strong(1.0, 0.1)};
  SolveConfig a, b;
  a.init = rng.normal_vec(10);
  b.init = rng.normal_vec(10);
  SolveResult ra = solve(F, a);
  SolveResult rb = solve(F, b);
  REQUIRE(ra.converged);
  REQUIRE(rb.converged);
  CHECK((ra.minimizer - rb.minimizer).norm() <= 1e-7);
}

TEST_CASE("exceeding max_iter flags the result as non-converged") {
  Rng rng(18);
  CostFunctional F{seeded_dense(12, 19), rng.normal_vec(12), 0.01,
                   Penalty::quadratic()};
  SolveConfig cfg;
  cfg.max_iter = 2;
  SolveResult sol = solve(F, cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 2);
}

TEST_CASE("solver input validation") {
  CostFunctional F{identity_op(2), Vec::Zero(2), 1.0, Penalty::quadratic()};
  SolveConfig cfg;
  cfg.grad_tol = 0.0;
  CHECK_THROWS_AS(solve(F, cfg), std::invalid_argument);
  SolveConfig bad_init;
  bad_init.init = Vec::Zero(3);
  CHECK_THROWS_AS(solve(F, bad_init), std::invalid_argument);
}
