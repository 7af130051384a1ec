#include "amlnewton/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "amlnewton/error.hpp"
#include "amlnewton/linalg.hpp"

namespace amln {

double newton_decrement(const Objective& f, const Vector& x) {
  return local_norm(f.hessian(x), f.gradient(x), Errc::SingularHessian);
}

double approximate_decrement(const Objective& f, const Vector& x, const RestrictionOp& op) {
  const ReducedModel model = f.reduced(x, op);
  return local_norm(model.hessian, model.gradient, Errc::SingularReducedHessian);
}

double g_next_level(const Objective& f, const Vector& x_next, const RestrictionOp& op) {
  return approximate_decrement(f, x_next, op);
}

std::vector<AikRatio> aik_ratios(std::span<const double> rg_now, std::span<const double> rg_next) {
  if (rg_now.size() != rg_next.size()) {
    throw Error(Errc::DimensionMismatch, "aik_ratios: per-level norm lists differ in length");
  }
  std::vector<AikRatio> out(rg_now.size());
  for (std::size_t i = 0; i < rg_now.size(); ++i) {
    if (!(rg_now[i] > 1e-300)) {
      out[i] = {std::numeric_limits<double>::quiet_NaN(), true};
    } else {
      out[i] = {rg_next[i] / rg_now[i], false};
    }
  }
  return out;
}

RateReport fit_quadratic_phase(std::span<const double> grad_norms, double floor) {
  if (grad_norms.size() < 3) {
    throw Error(Errc::InvalidArgument, "fit_quadratic_phase needs at least 3 gradient norms");
  }
  for (double g : grad_norms) {
    if (!(g >= 0.0)) throw Error(Errc::InvalidArgument, "gradient norms must be nonnegative");
  }

  std::size_t len = 0;
  while (len < grad_norms.size() && grad_norms[len] > 0.0 && grad_norms[len] >= floor) ++len;

  RateReport report;
  if (len < 3) return report;

  const auto g = grad_norms.first(len);
  auto ratio = [&](std::size_t j) { return g[j + 1] / (g[j] * g[j]); };
  auto contraction = [&](std::size_t j) { return g[j + 1] / g[j]; };

  // Transitions are j -> j+1 for j in [start, len - 2]; grow the suffix backwards.
  std::size_t last = len - 2;
  if (!(g[last + 1] < g[last])) return report;
  std::size_t start = last;
  double r_max = ratio(last);
  double r_min = r_max;
  while (start > 0) {
    const std::size_t j = start - 1;
    if (!(g[j + 1] < g[j])) break;
    if (!(contraction(j + 1) < contraction(j))) break;
    const double r = ratio(j);
    const double hi = std::max(r_max, r);
    const double lo = std::min(r_min, r);
    if (hi > 10.0 * lo) break;
    r_max = hi;
    r_min = lo;
    start = j;
  }

  const int tail = static_cast<int>(last - start + 1);
  if (tail < 2) return report;

  report.quad_onset_k = static_cast<int>(start);
  report.tail_len = tail;
  report.c_fit = r_max;

  bool any = false;
  bool all = true;
  for (std::size_t j = start; j <= last; ++j) {
    if (g[j] >= 1e-2) continue;
    any = true;
    if (-std::log10(g[j + 1]) < 1.8 * -std::log10(g[j])) all = false;
  }
  report.digits_doubling = any && all;
  return report;
}

}  // namespace amln
