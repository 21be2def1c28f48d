#include "convreg/penalties.hpp"

#include <cmath>
#include <stdexcept>

namespace convreg {

namespace {

// max_t |h'''(t)| for the pseudo-Huber atom h(t) = eps^2 (sqrt(1+(t/eps)^2)-1),
// attained at t = eps/2: 3/(2 eps) * (5/4)^{-5/2} = 48 sqrt(5) / (125 eps).
double pseudo_huber_hessian_lipschitz(double eps) {
  return 48.0 * std::sqrt(5.0) / (125.0 * eps);
}

}  // namespace

Penalty::Penalty(Kind kind, double mu, double eps, double radius)
    : kind_(kind), mu_(mu), eps_(eps), radius_(radius) {
  switch (kind_) {
    case Kind::Quadratic:
      name_ = "quadratic";
      cstar_ = 0.5;
      grad_lipschitz_ = 1.0;
      hessian_lipschitz_ = 0.0;
      constants_global_ = true;
      break;
    case Kind::PseudoHuberStrong:
      name_ = "pseudo-huber-strong";
      cstar_ = mu_ / 2.0;
      grad_lipschitz_ = mu_ + 1.0;  // atom curvature h'' in (0, 1]
      hessian_lipschitz_ = pseudo_huber_hessian_lipschitz(eps_);
      constants_global_ = true;
      break;
    case Kind::QuarticStrong:
      name_ = "quartic-strong";
      cstar_ = mu_ / 2.0;
      grad_lipschitz_ = mu_ + 3.0 * radius_ * radius_;
      hessian_lipschitz_ = 6.0 * radius_;
      constants_global_ = false;
      break;
  }
}

Penalty Penalty::quadratic() { return Penalty(Kind::Quadratic, 1.0, 0.0, 0.0); }

Penalty Penalty::pseudo_huber_strong(double mu, double eps) {
  if (!(mu > 0.0)) throw std::invalid_argument("pseudo-huber-strong: mu must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("pseudo-huber-strong: eps must be positive");
  return Penalty(Kind::PseudoHuberStrong, mu, eps, 0.0);
}

Penalty Penalty::quartic_strong(double mu, double radius) {
  if (!(mu > 0.0)) throw std::invalid_argument("quartic-strong: mu must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("quartic-strong: radius must be positive");
  return Penalty(Kind::QuarticStrong, mu, 0.0, radius);
}

Penalty Penalty::by_name(const std::string& name, double mu, double eps,
                         double radius) {
  if (name == "quadratic") return quadratic();
  if (name == "pseudo-huber-strong") return pseudo_huber_strong(mu, eps);
  if (name == "quartic-strong") return quartic_strong(mu, radius);
  throw std::invalid_argument("unknown penalty: " + name);
}

double Penalty::value(const Vec& x) const {
  switch (kind_) {
    case Kind::Quadratic:
      return 0.5 * x.squaredNorm();
    case Kind::PseudoHuberStrong: {
      double acc = 0.5 * mu_ * x.squaredNorm();
      for (Index i = 0; i < x.size(); ++i) {
        const double t = x[i] / eps_;
        acc += eps_ * eps_ * (std::sqrt(1.0 + t * t) - 1.0);
      }
      return acc;
    }
    case Kind::QuarticStrong: {
      double acc = 0.5 * mu_ * x.squaredNorm();
      for (Index i = 0; i < x.size(); ++i) {
        const double s = x[i] * x[i];
        acc += 0.25 * s * s;
      }
      return acc;
    }
  }
  throw std::logic_error("unreachable");
}

Vec Penalty::gradient(const Vec& x) const {
  switch (kind_) {
    case Kind::Quadratic:
      return x;
    case Kind::PseudoHuberStrong: {
      Vec g(x.size());
      for (Index i = 0; i < x.size(); ++i) {
        const double t = x[i] / eps_;
        g[i] = mu_ * x[i] + x[i] / std::sqrt(1.0 + t * t);
      }
      return g;
    }
    case Kind::QuarticStrong: {
      Vec g(x.size());
      for (Index i = 0; i < x.size(); ++i) g[i] = mu_ * x[i] + x[i] * x[i] * x[i];
      return g;
    }
  }
  throw std::logic_error("unreachable");
}

Vec Penalty::hessian_vec(const Vec& x, const Vec& w) const {
  if (x.size() != w.size()) {
    throw std::invalid_argument("hessian_vec: dimension mismatch");
  }
  switch (kind_) {
    case Kind::Quadratic:
      return w;
    case Kind::PseudoHuberStrong: {
      Vec h(x.size());
      for (Index i = 0; i < x.size(); ++i) {
        const double t = x[i] / eps_;
        h[i] = (mu_ + std::pow(1.0 + t * t, -1.5)) * w[i];
      }
      return h;
    }
    case Kind::QuarticStrong: {
      Vec h(x.size());
      for (Index i = 0; i < x.size(); ++i) h[i] = (mu_ + 3.0 * x[i] * x[i]) * w[i];
      return h;
    }
  }
  throw std::logic_error("unreachable");
}

double hessian_lipschitz_constant(const Penalty& p, std::optional<double> radius) {
  if (radius && !(*radius > 0.0)) {
    throw std::invalid_argument("hessian_lipschitz_constant: radius must be positive");
  }
  if (p.name() == "quadratic") return 0.0;
  if (p.name() == "pseudo-huber-strong") return p.hessian_lipschitz();
  if (p.name() == "quartic-strong") {
    if (!radius) {
      throw std::invalid_argument(
          "hessian_lipschitz_constant: quartic-strong has no global constant");
    }
    return 6.0 * *radius;
  }
  throw std::invalid_argument("hessian_lipschitz_constant: unknown penalty");
}

}  // namespace convreg
