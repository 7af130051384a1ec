#pragma once

#include <random>
#include <span>
#include <vector>

#include "amlnewton/types.hpp"

namespace amln {

/// Full-row-rank linear map R: R^n -> R^{n_i}. Prolongation is always R^T.
///
/// Row-sampling operators store only their (sorted, distinct) index list; the
/// j-th row of R is the indices[j]-th row of the n x n identity. Gaussian
/// sketches store the dense n_i x n matrix.
class RestrictionOp {
 public:
  enum class Kind { Identity, RowSampling, GaussianSketch };

  static RestrictionOp identity(Index n);
  /// Indices are sorted; throws InvalidArgument on duplicates or out-of-range.
  static RestrictionOp row_sampling(std::vector<Index> indices, Index n);
  /// Wraps an explicit dense matrix. Rank is not checked here.
  static RestrictionOp dense(Matrix matrix);

  Kind kind() const noexcept { return kind_; }
  Index input_dim() const noexcept { return n_; }
  Index output_dim() const noexcept { return n_out_; }

  /// True for Identity and for row sampling that keeps every index.
  bool is_full_space() const noexcept;

  std::span<const Index> indices() const noexcept { return indices_; }
  const Matrix& sketch() const noexcept { return matrix_; }

  Vector restrict(const Vector& v) const;
  Vector prolong(const Vector& w) const;

  /// R H R^T, exactly symmetric.
  Matrix galerkin(const Matrix& h) const;

  /// Explicit n_i x n matrix.
  Matrix to_dense() const;

 private:
  RestrictionOp(Kind kind, Index n, Index n_out) : kind_(kind), n_(n), n_out_(n_out) {}

  Kind kind_;
  Index n_;
  Index n_out_;
  std::vector<Index> indices_;
  Matrix matrix_;
};

RestrictionOp make_row_sampling(std::vector<Index> indices, Index n);

/// Dense sketch with i.i.d. N(0, 1/n_low) entries, so E||Rx||^2 = ||x||^2.
/// Regenerates up to 3 times if the draw is rank deficient.
RestrictionOp make_gaussian_sketch(Index n_low, Index n, std::mt19937_64& rng);
RestrictionOp make_gaussian_sketch(Index n_low, Index n, const RngSpec& rng);

struct SpectralBounds {
  double omega = 1.0;  // smallest singular value of P = R^T
  double xi = 1.0;     // largest singular value of P
};

SpectralBounds spectral_bounds(const RestrictionOp& op);

/// Smallest sketch dimension k for which the chi-square Chernoff tail bounds
/// guarantee (1-eps)||x|| <= ||Rx|| <= (1+eps)||x|| with probability >= 1-delta
/// for a fixed x. Grows as O(eps^-2 log(1/delta)).
Index jl_sketch_dimension(double eps, double delta);

}  // namespace amln
