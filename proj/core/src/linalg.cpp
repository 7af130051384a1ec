#include "amlnewton/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

namespace amln {

namespace {

bool try_solve(const Matrix& h, const Vector& rhs, Vector& out) {
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) return false;
  out = llt.solve(rhs);
  return out.allFinite();
}

}  // namespace

Vector solve_spd(const Matrix& h, const Vector& rhs, double jitter_rel, Errc failure) {
  if (h.rows() != h.cols() || h.rows() != rhs.size()) {
    throw Error(Errc::DimensionMismatch, "solve_spd: system shape mismatch");
  }
  Vector out;
  if (try_solve(h, rhs, out)) return out;

  const double scale = h.rows() > 0 ? h.diagonal().cwiseAbs().mean() : 1.0;
  double jitter = jitter_rel * (scale > 0.0 ? scale : 1.0);
  constexpr int kRetries = 5;
  for (int attempt = 0; attempt < kRetries && jitter > 0.0; ++attempt, jitter *= 2.0) {
    Matrix shifted = h;
    shifted.diagonal().array() += jitter;
    if (try_solve(shifted, rhs, out)) return out;
  }
  throw Error(failure, "Cholesky factorization failed for a " + std::to_string(h.rows()) + "x" +
                           std::to_string(h.cols()) + " system");
}

double local_norm(const Matrix& h, const Vector& g, Errc failure) {
  if (h.rows() != h.cols() || h.rows() != g.size()) {
    throw Error(Errc::DimensionMismatch, "local_norm: shape mismatch");
  }
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) {
    throw Error(failure, "matrix is not positive definite");
  }
  const double value = llt.matrixL().solve(g).norm();
  if (!std::isfinite(value)) throw Error(failure, "non-finite local norm");
  return value;
}

}  // namespace amln
