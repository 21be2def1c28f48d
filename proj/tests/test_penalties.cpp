#include <doctest.h>

#include <cmath>

#include "convreg/penalties.hpp"

using namespace convreg;

namespace {

Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
}

// central finite differences of the value, the independent route against the
// analytic gradient
Vec fd_gradient(const Penalty& p, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (p.value(xp) - p.value(xm)) / (2.0 * h);
  }
  return g;
}

std::vector<Penalty> catalog() {
  return {Penalty::quadratic(), Penalty::pseudo_huber_strong(1.0, 1.0),
          Penalty::pseudo_huber_strong(1.0, 0.1), Penalty::quartic_strong(1.0, 2.0)};
}

}  // namespace

TEST_CASE("quadratic value and gradient") {
  auto p = Penalty::quadratic();
  Vec x(2);
  x << 3.0, 4.0;
  CHECK(p.value(x) == 12.5);
  Vec g = p.gradient(x);
  CHECK(g[0] == 3.0);
  CHECK(g[1] == 4.0);
}

TEST_CASE("all catalog penalties vanish at zero with zero gradient") {
  for (const auto& p : catalog()) {
    Vec zero = Vec::Zero(3);
    CHECK(p.value(zero) == 0.0);
    CHECK(p.gradient(zero).norm() == 0.0);
  }
}

TEST_CASE("pseudo-huber-strong closed-form values at x = 1") {
  auto p = Penalty::pseudo_huber_strong(1.0, 1.0);
  CHECK(p.value(vec1(1.0)) ==
        doctest::Approx(0.5 + std::sqrt(2.0) - 1.0).epsilon(1e-15));  // 0.914213...
  CHECK(p.gradient(vec1(1.0))[0] ==
        doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-15));  // 1.707106...
}

TEST_CASE("values are nonnegative on random probes") {
  Rng rng(8);
  for (const auto& p : catalog()) {
    for (int trial = 0; trial < 100; ++trial) {
      Vec x = rng.uniform_vec(5, -1.5, 1.5);
      CHECK(p.value(x) >= 0.0);
    }
  }
}

TEST_CASE("gradient matches finite differences on 100 probes per penalty") {
  Rng rng(9);
  for (const auto& p : catalog()) {
    for (int trial = 0; trial < 100; ++trial) {
      Vec x = rng.uniform_vec(4, -1.5, 1.5);
      Vec g = p.gradient(x);
      Vec fd = fd_gradient(p, x);
      CHECK((g - fd).norm() <= 1e-5 * (1.0 + g.norm()));
    }
  }
}

TEST_CASE("gradient is monotone") {
  Rng rng(10);
  for (const auto& p : catalog()) {
    for (int trial = 0; trial < 100; ++trial) {
      Vec u = rng.uniform_vec(4, -1.5, 1.5);
      Vec v = rng.uniform_vec(4, -1.5, 1.5);
      CHECK((p.gradient(u) - p.gradient(v)).dot(u - v) >= -1e-12);
    }
  }
}

TEST_CASE("gradient Lipschitz bound holds on random pairs inside the radius") {
  Rng rng(11);
  for (const auto& p : catalog()) {
    const double r = p.constants_are_global() ? 1.5 : p.declared_radius() / 2.0;
    for (int trial = 0; trial < 100; ++trial) {
      Vec u = rng.uniform_vec(4, -r, r);
      Vec v = rng.uniform_vec(4, -r, r);
      CHECK((p.gradient(u) - p.gradient(v)).norm() <=
            p.grad_lipschitz() * (u - v).norm() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("convexity chord inequality") {
  // <grad J(v), u-v> <= J(u) - J(v) <= <grad J(u), u-v>
  Rng rng(12);
  for (const auto& p : catalog()) {
    for (int trial = 0; trial < 100; ++trial) {
      Vec u = rng.uniform_vec(4, -1.5, 1.5);
      Vec v = rng.uniform_vec(4, -1.5, 1.5);
      const double gap = p.value(u) - p.value(v);
      CHECK(gap - p.gradient(v).dot(u - v) >= -1e-10);
      CHECK(p.gradient(u).dot(u - v) - gap >= -1e-10);
    }
  }
}

TEST_CASE("2-convexity: bregman gap dominates cstar ||u-v||^2") {
  Rng rng(13);
  for (const auto& p : catalog()) {
    const double r = p.constants_are_global() ? 2.0 : p.declared_radius() / 2.0;
    for (int trial = 0; trial < 100; ++trial) {
      Vec u = rng.uniform_vec(4, -r, r);
      Vec v = rng.uniform_vec(4, -r, r);
      const double d = p.value(u) - p.value(v) - p.gradient(v).dot(u - v);
      CHECK(d >= p.convexity_modulus2() * (u - v).squaredNorm() - 1e-10);
    }
  }
}

TEST_CASE("hessian_vec agrees with finite differences of the gradient") {
  Rng rng(14);
  for (const auto& p : catalog()) {
    for (int trial = 0; trial < 20; ++trial) {
      Vec x = rng.uniform_vec(4, -1.0, 1.0);
      Vec w = rng.normal_vec(4);
      const double h = 1e-6;
      Vec fd = (p.gradient(x + h * w) - p.gradient(x - h * w)) / (2.0 * h);
      CHECK((p.hessian_vec(x, w) - fd).norm() <= 1e-5 * (1.0 + w.norm()));
    }
  }
}

TEST_CASE("hessian Lipschitz certificate on sampled pairs") {
  Rng rng(15);
  for (const auto& p : catalog()) {
    const double r = p.constants_are_global() ? 5.0 : p.declared_radius();
    const double lh = p.hessian_lipschitz();
    for (int trial = 0; trial < 200; ++trial) {
      Vec u = rng.uniform_vec(4, -r, r);
      Vec v = rng.uniform_vec(4, -r, r);
      Vec w = rng.normal_vec(4);
      const double lhs = (p.hessian_vec(u, w) - p.hessian_vec(v, w)).norm();
      CHECK(lhs <= lh * (u - v).norm() * w.norm() * (1.0 + 1e-8) + 1e-14);
    }
  }
}

TEST_CASE("hessian_lipschitz_constant for the catalog") {
  CHECK(hessian_lipschitz_constant(Penalty::quadratic(), std::nullopt) == 0.0);

  // max |h'''| = 3 (1/2) (5/4)^{-5/2} ~ 0.858650 for eps = 1; confirmed below
  // by sampling
  const double lh = hessian_lipschitz_constant(Penalty::pseudo_huber_strong(1.0, 1.0),
                                               std::nullopt);
  CHECK(lh == doctest::Approx(3.0 * 0.5 * std::pow(1.25, -2.5)).epsilon(1e-14));
  auto h2 = [](double t) { return std::pow(1.0 + t * t, -1.5); };
  double max_slope = 0.0;
  const int grid = 20000;
  for (int i = 0; i < grid; ++i) {
    double a = -10.0 + 20.0 * i / grid;
    double b = a + 20.0 / grid;
    max_slope = std::max(max_slope, std::abs(h2(a) - h2(b)) / (b - a));
  }
  CHECK(max_slope <= lh * (1.0 + 1e-6));
  CHECK(max_slope >= lh * 0.99);  // the bound is tight

  CHECK(hessian_lipschitz_constant(Penalty::quartic_strong(1.0, 2.0), 2.0) == 12.0);
  CHECK_THROWS_AS(hessian_lipschitz_constant(Penalty::quartic_strong(1.0, 2.0),
                                             std::nullopt),
                  std::invalid_argument);
}

TEST_CASE("catalog constants") {
  auto quad = Penalty::quadratic();
  CHECK(quad.grad_lipschitz() == 1.0);
  CHECK(quad.hessian_lipschitz() == 0.0);
  CHECK(quad.convexity_modulus2() == 0.5);

  auto ph = Penalty::pseudo_huber_strong(2.0, 0.5);
  CHECK(ph.convexity_modulus2() == 1.0);
  CHECK(ph.grad_lipschitz() == 3.0);
  CHECK(ph.constants_are_global());

  auto q = Penalty::quartic_strong(1.0, 2.0);
  CHECK(q.convexity_modulus2() == 0.5);
  CHECK_FALSE(q.constants_are_global());
  CHECK(q.hessian_lipschitz() == 12.0);
}

TEST_CASE("penalty lookup by name") {
  CHECK(Penalty::by_name("quadratic", 0, 0, 0).name() == "quadratic");
  CHECK(Penalty::by_name("pseudo-huber-strong", 1.0, 0.1, 0).name() ==
        "pseudo-huber-strong");
  CHECK(Penalty::by_name("quartic-strong", 1.0, 0, 10.0).name() == "quartic-strong");
  CHECK_THROWS_AS(Penalty::by_name("tv", 1, 1, 1), std::invalid_argument);
}
