#pragma once

#include <optional>
#include <span>
#include <vector>

#include "amlnewton/problem.hpp"
#include "amlnewton/restriction.hpp"
#include "amlnewton/types.hpp"

namespace amln {

/// Newton decrement sqrt(g^T H^{-1} g). Throws SingularHessian.
double newton_decrement(const Objective& f, const Vector& x);

/// sqrt(g_i^T H_i^{-1} g_i) with (g_i, H_i) the reduced model at x.
/// Never exceeds the Newton decrement. Throws SingularReducedHessian.
double approximate_decrement(const Objective& f, const Vector& x, const RestrictionOp& op);

/// The approximate decrement evaluated at the next iterate: the quantity the
/// self-concordant acceptance test compares against the Newton decrement.
/// Diagnostic only; the solvers never use it to accept a level.
double g_next_level(const Objective& f, const Vector& x_next, const RestrictionOp& op);

/// Per-iteration decrement record kept when a solve runs with diagnostics.
struct DecrementSample {
  int k = 0;
  double lambda_k = 0.0;      // Newton decrement at x_k
  double lambda_next = 0.0;   // Newton decrement at x_{k+1}
  int accepted_level = 0;
  std::vector<int> levels;
  std::vector<Index> dims;
  std::vector<double> lambda_hat;  // approximate decrement at x_k, per level
  std::vector<double> g_next;      // g_{i,k}(x_{k+1}), per level
  std::vector<double> rg_now;      // ||R_i grad F(x_k)||
  std::vector<double> rg_next;     // ||R_i grad F(x_{k+1})||
};

struct AikRatio {
  double value = 0.0;
  bool underflow = false;  // denominator <= 1e-300; value is NaN
};

/// a_{i,k} = ||R_i grad F(x_{k+1})|| / ||R_i grad F(x_k)||, elementwise.
std::vector<AikRatio> aik_ratios(std::span<const double> rg_now, std::span<const double> rg_next);

struct RateReport {
  std::optional<int> quad_onset_k;
  double c_fit = 0.0;
  bool digits_doubling = false;
  int tail_len = 0;  // number of transitions g_k -> g_{k+1} in the tail
};

/// Locates the quadratic phase of a gradient-norm sequence.
///
/// The sequence is cut at the first entry that is non-positive or below
/// `floor` (numerical noise). The tail is the longest suffix on which
///   - ||g|| strictly decreases,
///   - the contraction factor ||g_{k+1}|| / ||g_k|| strictly decreases, and
///   - r_k = ||g_{k+1}|| / ||g_k||^2 stays within a factor 10 (max/min).
/// A tail needs at least two transitions. C_fit is the largest r_k on it.
/// digits_doubling holds when every tail transition that starts below 1e-2
/// satisfies -log10 g_{k+1} >= 1.8 (-log10 g_k), and at least one does.
///
/// Throws InvalidArgument for fewer than 3 entries or negative entries.
RateReport fit_quadratic_phase(std::span<const double> grad_norms, double floor);

}  // namespace amln
