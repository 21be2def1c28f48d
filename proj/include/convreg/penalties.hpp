#pragma once

#include <optional>
#include <string>

#include "convreg/types.hpp"

namespace convreg {

/// Smooth convex penalty J with analytic gradient, Hessian-vector product,
/// and the certified constants the parameter rules and diagnostics consume:
///
///   - c*  : 2-convexity modulus, D_J(u,v) >= c* ||u-v||^2
///   - L   : gradient Lipschitz constant
///   - L_H : Hessian Lipschitz constant
///
/// The catalog:
///   quadratic            J(x) = 1/2 ||x||^2
///   pseudo-huber-strong  J(x) = mu/2 ||x||^2 + sum_i eps^2 (sqrt(1+(x_i/eps)^2) - 1)
///   quartic-strong       J(x) = mu/2 ||x||^2 + 1/4 sum_i x_i^4
///
/// For quartic-strong, L and L_H have no global value; the stored constants
/// are certified on the ball of the declared radius.
class Penalty {
 public:
  static Penalty quadratic();
  static Penalty pseudo_huber_strong(double mu, double eps);
  static Penalty quartic_strong(double mu, double radius);
  static Penalty by_name(const std::string& name, double mu, double eps,
                         double radius);

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Vec hessian_vec(const Vec& x, const Vec& w) const;

  const std::string& name() const { return name_; }
  int smoothness_class() const { return 2; }  // all catalog entries are C^2
  double convexity_modulus2() const { return cstar_; }
  double grad_lipschitz() const { return grad_lipschitz_; }
  double hessian_lipschitz() const { return hessian_lipschitz_; }
  /// False when the stored L / L_H only hold on the declared radius.
  bool constants_are_global() const { return constants_global_; }
  double declared_radius() const { return radius_; }

  double mu() const { return mu_; }
  double eps() const { return eps_; }

 private:
  enum class Kind { Quadratic, PseudoHuberStrong, QuarticStrong };
  Penalty(Kind kind, double mu, double eps, double radius);

  Kind kind_;
  std::string name_;
  double mu_ = 0.0;
  double eps_ = 0.0;
  double radius_ = 0.0;
  double cstar_ = 0.0;
  double grad_lipschitz_ = 0.0;
  double hessian_lipschitz_ = 0.0;
  bool constants_global_ = true;
};

/// Certified Hessian Lipschitz constant of a catalog penalty, globally
/// (radius = nullopt) or on the ball of the given radius. Requesting a
/// global constant for quartic-strong throws: none exists.
double hessian_lipschitz_constant(const Penalty& p,
                                  std::optional<double> radius);

}  // namespace convreg
