#include "amlnewton/restriction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "amlnewton/error.hpp"

namespace amln {

RestrictionOp RestrictionOp::identity(Index n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "identity operator needs n >= 1");
  return RestrictionOp(Kind::Identity, n, n);
}

RestrictionOp RestrictionOp::row_sampling(std::vector<Index> indices, Index n) {
  if (indices.empty()) throw Error(Errc::InvalidArgument, "row sampling needs at least one index");
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw Error(Errc::InvalidArgument, "row sampling indices must be distinct");
  }
  if (indices.front() < 0 || indices.back() >= n) {
    throw Error(Errc::InvalidArgument,
                "row sampling index out of range [0, " + std::to_string(n) + ")");
  }
  RestrictionOp op(Kind::RowSampling, n, static_cast<Index>(indices.size()));
  op.indices_ = std::move(indices);
  return op;
}

RestrictionOp RestrictionOp::dense(Matrix matrix) {
  if (matrix.rows() < 1 || matrix.cols() < 1 || matrix.rows() > matrix.cols()) {
    throw Error(Errc::InvalidArgument, "sketch must be n_low x n with 1 <= n_low <= n");
  }
  RestrictionOp op(Kind::GaussianSketch, matrix.cols(), matrix.rows());
  op.matrix_ = std::move(matrix);
  return op;
}

bool RestrictionOp::is_full_space() const noexcept {
  return kind_ == Kind::Identity || (kind_ == Kind::RowSampling && n_out_ == n_);
}

Vector RestrictionOp::restrict(const Vector& v) const {
  if (v.size() != n_) {
    throw Error(Errc::DimensionMismatch, "restrict: expected length " + std::to_string(n_) +
                                             ", got " + std::to_string(v.size()));
  }
  switch (kind_) {
    case Kind::Identity:
      return v;
    case Kind::RowSampling:
      return v(indices_);
    case Kind::GaussianSketch:
      return matrix_ * v;
  }
  return {};
}

Vector RestrictionOp::prolong(const Vector& w) const {
  if (w.size() != n_out_) {
    throw Error(Errc::DimensionMismatch, "prolong: expected length " + std::to_string(n_out_) +
                                             ", got " + std::to_string(w.size()));
  }
  switch (kind_) {
    case Kind::Identity:
      return w;
    case Kind::RowSampling: {
      Vector out = Vector::Zero(n_);
      out(indices_) = w;
      return out;
    }
    case Kind::GaussianSketch:
      return matrix_.transpose() * w;
  }
  return {};
}

Matrix RestrictionOp::galerkin(const Matrix& h) const {
  if (h.rows() != n_ || h.cols() != n_) {
    throw Error(Errc::DimensionMismatch, "galerkin: Hessian is not " + std::to_string(n_) + "x" +
                                             std::to_string(n_));
  }
  switch (kind_) {
    case Kind::Identity:
      return h;
    case Kind::RowSampling:
      return h(indices_, indices_);
    case Kind::GaussianSketch: {
      Matrix out = matrix_ * h * matrix_.transpose();
      return 0.5 * (out + out.transpose());
    }
  }
  return {};
}

Matrix RestrictionOp::to_dense() const {
  switch (kind_) {
    case Kind::Identity:
      return Matrix::Identity(n_, n_);
    case Kind::RowSampling: {
      Matrix out = Matrix::Zero(n_out_, n_);
      for (Index j = 0; j < n_out_; ++j) out(j, indices_[static_cast<std::size_t>(j)]) = 1.0;
      return out;
    }
    case Kind::GaussianSketch:
      return matrix_;
  }
  return {};
}

RestrictionOp make_row_sampling(std::vector<Index> indices, Index n) {
  return RestrictionOp::row_sampling(std::move(indices), n);
}

RestrictionOp make_gaussian_sketch(Index n_low, Index n, std::mt19937_64& rng) {
  if (n_low < 1 || n < 1) throw Error(Errc::InvalidArgument, "sketch dimensions must be >= 1");
  if (n_low > n) {
    throw Error(Errc::RankDeficient, "sketch with n_low = " + std::to_string(n_low) +
                                         " > n = " + std::to_string(n) + " cannot have full row rank");
  }
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n_low)));
  constexpr int kAttempts = 3;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Matrix m(n_low, n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n_low; ++i) m(i, j) = normal(rng);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    if (qr.rank() == n_low) return RestrictionOp::dense(std::move(m));
  }
  throw Error(Errc::RankDeficient, "Gaussian sketch rank deficient after 3 attempts");
}

RestrictionOp make_gaussian_sketch(Index n_low, Index n, const RngSpec& rng) {
  auto engine = rng.engine();
  return make_gaussian_sketch(n_low, n, engine);
}

SpectralBounds spectral_bounds(const RestrictionOp& op) {
  if (op.kind() != RestrictionOp::Kind::GaussianSketch) return {1.0, 1.0};
  Eigen::JacobiSVD<Matrix> svd(op.sketch().transpose());
  const Vector& s = svd.singularValues();
  return {s.minCoeff(), s.maxCoeff()};
}

Index jl_sketch_dimension(double eps, double delta) {
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw Error(Errc::InvalidArgument, "jl_sketch_dimension needs eps, delta in (0, 1)");
  }
  // ||Rx||^2 / ||x||^2 ~ chi2_k / k for Gaussian R with variance 1/k.
  const double up = (1.0 + eps) * (1.0 + eps) - 1.0;
  const double down = 1.0 - (1.0 - eps) * (1.0 - eps);
  const double rate_up = 0.5 * (up - std::log1p(up));
  const double rate_down = 0.5 * (-down - std::log1p(-down));
  for (Index k = 1;; ++k) {
    const double kk = static_cast<double>(k);
    if (std::exp(-kk * rate_up) + std::exp(-kk * rate_down) <= delta) return k;
  }
}

}  // namespace amln
