#pragma once

#include <cstdint>
#include <string>

#include "convreg/types.hpp"

namespace convreg {

enum class OperatorKind { Diagonal, Dense, Convolution };

/// Discretized linear forward operator T with an exact adjoint T*.
///
/// Three representations are supported:
///   - Diagonal: strictly positive, nonincreasing singular values (injective).
///   - Dense: an arbitrary m x n matrix.
///   - Convolution: odd-length kernel applied with zero-padded boundaries,
///     so the operator coincides with its dense banded matrix.
///
/// Instances are immutable after construction; spectral extremes are
/// precomputed once so that apply/apply_adjoint stay allocation-only and
/// thread-safe.
class ForwardOperator {
 public:
  static ForwardOperator diagonal(Vec singular_values);
  static ForwardOperator dense(Mat matrix);
  static ForwardOperator convolution(Vec kernel, Index n);

  Vec apply(const Vec& x) const;
  Vec apply_adjoint(const Vec& y) const;

  OperatorKind kind() const { return kind_; }
  Index domain_dim() const { return domain_dim_; }
  Index range_dim() const { return range_dim_; }

  /// Materializes the operator as a dense matrix (row i = e_i^T T).
  Mat to_dense() const;

  /// Exact largest/smallest singular values (diagonal: read off; otherwise
  /// computed once from the dense representation at construction).
  double largest_singular_value() const { return sigma_max_; }
  double smallest_singular_value() const { return sigma_min_; }

  const Vec& singular_values() const;  // Diagonal only
  const Vec& kernel() const;           // Convolution only

 private:
  ForwardOperator() = default;

  OperatorKind kind_ = OperatorKind::Dense;
  Index domain_dim_ = 0;
  Index range_dim_ = 0;
  Vec diag_;      // Diagonal
  Mat matrix_;    // Dense
  Vec kernel_;    // Convolution
  double sigma_max_ = 0.0;
  double sigma_min_ = 0.0;
};

/// Result of the power-iteration estimate of ||T|| = ||T*||.
struct OperatorNormEstimate {
  double value = 0.0;      // sqrt of the Rayleigh quotient of T*T at exit
  int iterations = 0;
  double residual = 0.0;   // last successive-estimate difference
  bool converged = false;
};

/// Power iteration on T*T from a seeded random start. Terminates when two
/// successive estimates differ by at most tol, or at max_iter with the best
/// estimate and its residual.
OperatorNormEstimate operator_norm(const ForwardOperator& op, double tol,
                                   int max_iter, std::uint64_t seed);

}  // namespace convreg
