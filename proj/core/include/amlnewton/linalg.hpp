#pragma once

#include "amlnewton/error.hpp"
#include "amlnewton/types.hpp"

namespace amln {

/// Solves H d = rhs by Cholesky. If H is not numerically SPD, retries with
/// H + j I where j starts at jitter_rel * mean(diag H) and doubles, at most 5
/// retries. Throws `failure` when every attempt fails.
Vector solve_spd(const Matrix& h, const Vector& rhs, double jitter_rel, Errc failure);

/// sqrt(g^T H^{-1} g) computed as ||L^{-1} g|| with H = L L^T. No jitter.
double local_norm(const Matrix& h, const Vector& g, Errc failure);

}  // namespace amln
