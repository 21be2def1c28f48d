#include "convreg/operators.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace convreg {

namespace {

void check_dim(Index got, Index want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                std::to_string(got) + ", want " +
                                std::to_string(want) + ")");
  }
}

std::pair<double, double> spectral_extremes(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  return {s(0), s(s.size() - 1)};
}

}  // namespace

ForwardOperator ForwardOperator::diagonal(Vec singular_values) {
  if (singular_values.size() == 0) {
    throw std::invalid_argument("diagonal operator: empty singular values");
  }
  for (Index i = 0; i < singular_values.size(); ++i) {
    if (!(singular_values[i] > 0.0)) {
      throw std::invalid_argument("diagonal operator: singular values must be strictly positive");
    }
    if (i > 0 && singular_values[i] > singular_values[i - 1]) {
      throw std::invalid_argument("diagonal operator: singular values must be nonincreasing");
    }
  }
  ForwardOperator op;
  op.kind_ = OperatorKind::Diagonal;
  op.domain_dim_ = op.range_dim_ = singular_values.size();
  op.sigma_max_ = singular_values[0];
  op.sigma_min_ = singular_values[singular_values.size() - 1];
  op.diag_ = std::move(singular_values);
  return op;
}

ForwardOperator ForwardOperator::dense(Mat matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0) {
    throw std::invalid_argument("dense operator: empty matrix");
  }
  if (!matrix.allFinite()) {
    throw std::invalid_argument("dense operator: non-finite entries");
  }
  ForwardOperator op;
  op.kind_ = OperatorKind::Dense;
  op.domain_dim_ = matrix.cols();
  op.range_dim_ = matrix.rows();
  std::tie(op.sigma_max_, op.sigma_min_) = spectral_extremes(matrix);
  op.matrix_ = std::move(matrix);
  return op;
}

ForwardOperator ForwardOperator::convolution(Vec kernel, Index n) {
  if (kernel.size() == 0 || kernel.size() % 2 == 0) {
    throw std::invalid_argument("convolution operator: kernel length must be odd");
  }
  if (n < 1) throw std::invalid_argument("convolution operator: n must be positive");
  if (!kernel.allFinite()) {
    throw std::invalid_argument("convolution operator: non-finite kernel");
  }
  ForwardOperator op;
  op.kind_ = OperatorKind::Convolution;
  op.domain_dim_ = op.range_dim_ = n;
  op.kernel_ = std::move(kernel);
  std::tie(op.sigma_max_, op.sigma_min_) = spectral_extremes(op.to_dense());
  return op;
}

Vec ForwardOperator::apply(const Vec& x) const {
  check_dim(x.size(), domain_dim_, "apply");
  switch (kind_) {
    case OperatorKind::Diagonal:
      return diag_.cwiseProduct(x);
    case OperatorKind::Dense:
      return matrix_ * x;
    case OperatorKind::Convolution: {
      const Index r = (kernel_.size() - 1) / 2;
      Vec y = Vec::Zero(range_dim_);
      for (Index i = 0; i < range_dim_; ++i) {
        double acc = 0.0;
        for (Index j = -r; j <= r; ++j) {
          const Index src = i - j;
          if (src >= 0 && src < domain_dim_) acc += kernel_[j + r] * x[src];
        }
        y[i] = acc;
      }
      return y;
    }
  }
  throw std::logic_error("unreachable");
}

Vec ForwardOperator::apply_adjoint(const Vec& y) const {
  check_dim(y.size(), range_dim_, "apply_adjoint");
  switch (kind_) {
    case OperatorKind::Diagonal:
      return diag_.cwiseProduct(y);
    case OperatorKind::Dense:
      return matrix_.transpose() * y;
    case OperatorKind::Convolution: {
      // Adjoint of zero-padded convolution is correlation with the kernel.
      const Index r = (kernel_.size() - 1) / 2;
      Vec x = Vec::Zero(domain_dim_);
      for (Index m = 0; m < domain_dim_; ++m) {
        double acc = 0.0;
        for (Index j = -r; j <= r; ++j) {
          const Index src = m + j;
          if (src >= 0 && src < range_dim_) acc += kernel_[j + r] * y[src];
        }
        x[m] = acc;
      }
      return x;
    }
  }
  throw std::logic_error("unreachable");
}

Mat ForwardOperator::to_dense() const {
  switch (kind_) {
    case OperatorKind::Diagonal:
      return Mat(diag_.asDiagonal());
    case OperatorKind::Dense:
      return matrix_;
    case OperatorKind::Convolution: {
      const Index r = (kernel_.size() - 1) / 2;
      Mat a = Mat::Zero(range_dim_, domain_dim_);
      for (Index i = 0; i < range_dim_; ++i) {
        for (Index j = -r; j <= r; ++j) {
          const Index col = i - j;
          if (col >= 0 && col < domain_dim_) a(i, col) = kernel_[j + r];
        }
      }
      return a;
    }
  }
  throw std::logic_error("unreachable");
}

const Vec& ForwardOperator::singular_values() const {
  if (kind_ != OperatorKind::Diagonal) {
    throw std::logic_error("singular_values: not a diagonal operator");
  }
  return diag_;
}

const Vec& ForwardOperator::kernel() const {
  if (kind_ != OperatorKind::Convolution) {
    throw std::logic_error("kernel: not a convolution operator");
  }
  return kernel_;
}

OperatorNormEstimate operator_norm(const ForwardOperator& op, double tol,
                                   int max_iter, std::uint64_t seed) {
  if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("operator_norm: max_iter must be >= 1");

  Rng rng(seed);
  Vec x = rng.normal_vec(op.domain_dim());
  if (x.norm() == 0.0) x.setOnes();  // probability-zero start
  x /= x.norm();

  OperatorNormEstimate est;
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vec tx = op.apply(x);
    double value = tx.norm();  // sqrt of Rayleigh quotient of T*T at unit x
    est.value = value;
    est.iterations = it;
    est.residual = std::abs(value - prev);
    if (it > 1 && est.residual <= tol) {
      est.converged = true;
      return est;
    }
    prev = value;
    Vec next = op.apply_adjoint(tx);
    double norm = next.norm();
    if (norm == 0.0) {  // x in the null space; the estimate 0 is exact for it
      est.converged = true;
      est.residual = 0.0;
      return est;
    }
    x = next / norm;
  }
  est.converged = false;
  return est;
}

}  // namespace convreg
