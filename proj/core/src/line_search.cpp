#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "amlnewton/error.hpp"
#include "amlnewton/solvers.hpp"

namespace amln {

void LineSearchConfig::validate() const {
  if (!(c1 > 0.0 && c1 < 1.0)) throw Error(Errc::InvalidArgument, "line_search.c1 must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw Error(Errc::InvalidArgument, "line_search.backtrack must lie in (0, 1)");
  }
  if (!(t0 > 0.0)) throw Error(Errc::InvalidArgument, "line_search.t0 must be positive");
  if (max_backtracks < 0) throw Error(Errc::InvalidArgument, "line_search.max_backtracks must be >= 0");
}

LineSearchResult armijo_search(const Objective& f, const Vector& x, const Vector& d, const LineSearchConfig& cfg) {
  return armijo_search(f, x, f.value(x), f.gradient(x), d, cfg);
}

LineSearchResult armijo_search(const Objective& f, const Vector& x, double fx, const Vector& gx, const Vector& d,
                               const LineSearchConfig& cfg) {
  if (d.size() != x.size() || gx.size() != x.size()) {
    throw Error(Errc::DimensionMismatch, "armijo_search: vector lengths differ");
  }
  if (d.isZero(0.0)) return {0.0, x, fx, 0};

  const double slope = gx.dot(d);
  if (!(slope < 0.0)) {
    throw Error(Errc::LineSearchFailed, "direction is not a descent direction (slope " + std::to_string(slope) + ")");
  }

  const double resolution = 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx));
  const bool unresolvable = cfg.c1 * cfg.t0 * -slope <= resolution;

  double t = cfg.t0;
  for (int j = 0; j <= cfg.max_backtracks; ++j, t *= cfg.backtrack) {
    Vector trial = x + t * d;
    double ft;
    try {
      ft = f.value(trial);
    } catch (const Error& e) {
      if (e.code() != Errc::NumericalOverflow) throw;
      continue;
    }
    if (ft <= fx + cfg.c1 * t * slope) return {t, std::move(trial), ft, j};
    if (j == 0 && unresolvable && ft <= fx + resolution) return {t, std::move(trial), ft, j};
  }
  throw Error(Errc::LineSearchFailed,
              "no step satisfied the Armijo condition after " + std::to_string(cfg.max_backtracks) + " backtracks");
}

}  // namespace amln
