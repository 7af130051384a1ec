#include "app/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "amlnewton/error.hpp"

namespace amln::app {

namespace {

constexpr double kGradTol = 1e-6;
constexpr double kHessTol = 1e-5;
constexpr double kExactTol = 1e-12;

double fd_step(double xi) { return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(xi)); }

CheckResult make(std::string name, std::string where, double value, double tol) {
  return {std::move(name), std::move(where), value, tol, std::isfinite(value) && value <= tol};
}

}  // namespace

std::vector<Vector> check_points(const Vector& x0, int extra, std::uint64_t seed) {
  std::vector<Vector> points{x0};
  auto rng = RngSpec{seed, 4}.engine();
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<Index>(1, x0.size())));
  for (int i = 0; i < extra; ++i) points.push_back(x0 + gaussian_vector(x0.size(), rng, scale));
  return points;
}

double gradient_fd_error(const Objective& f, const Vector& x) {
  const Vector g = f.gradient(x);
  Vector fd(x.size());
  Vector xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x[i]);
    xp[i] = x[i] + h;
    const double up = f.value(xp);
    xp[i] = x[i] - h;
    const double down = f.value(xp);
    xp[i] = x[i];
    fd[i] = (up - down) / (2.0 * h);
  }
  return (fd - g).norm() / std::max(1.0, g.norm());
}

double hessian_fd_error(const Objective& f, const Vector& x) {
  const Matrix h = f.hessian(x);
  Matrix fd(x.size(), x.size());
  Vector xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double step = fd_step(x[i]);
    xp[i] = x[i] + step;
    const Vector up = f.gradient(xp);
    xp[i] = x[i] - step;
    const Vector down = f.gradient(xp);
    xp[i] = x[i];
    fd.col(i) = (up - down) / (2.0 * step);
  }
  return (fd - h).norm() / std::max(1.0, h.norm());
}

std::vector<CheckResult> run_checks(const Objective& f, const CheckPlan& plan) {
  std::vector<CheckResult> out;
  const Index n = f.dim();
  auto probe = RngSpec{plan.seed, 5}.engine();

  for (std::size_t p = 0; p < plan.points.size(); ++p) {
    const Vector& x = plan.points[p];
    const std::string at = "x" + std::to_string(p);
    if (x.size() != n) throw Error(Errc::DimensionMismatch, "check point has the wrong dimension");

    out.push_back(make("gradient_fd", at, gradient_fd_error(f, x), kGradTol));
    out.push_back(make("hessian_fd", at, hessian_fd_error(f, x), kHessTol));

    const Vector g = f.gradient(x);
    const Matrix h = f.hessian(x);
    out.push_back(make("hessian_symmetric", at, (h - h.transpose()).cwiseAbs().maxCoeff(), 0.0));
    if (plan.expect_spd) {
      const bool spd = Eigen::LLT<Matrix>(h).info() == Eigen::Success;
      out.push_back(make("hessian_spd", at, spd ? 0.0 : 1.0, 0.0));
    } else {
      const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
      const double scale = std::max(1.0, h.norm());
      out.push_back(make("hessian_psd", at, std::max(0.0, -lmin) / scale, kExactTol));
    }

    for (std::size_t o = 0; o < plan.ops.size(); ++o) {
      const RestrictionOp& op = *plan.ops[o];
      const std::string where = at + "/R" + std::to_string(o + 1);
      const ReducedModel m = f.reduced(x, op);
      const Vector rg = op.restrict(g);
      const Matrix rh = op.galerkin(h);
      const double err = std::max((m.gradient - rg).norm() / std::max(1.0, rg.norm()),
                                  (m.hessian - rh).norm() / std::max(1.0, rh.norm()));
      out.push_back(make("reduced_model", where, err, kExactTol));
    }
  }

  for (std::size_t o = 0; o < plan.ops.size(); ++o) {
    const RestrictionOp& op = *plan.ops[o];
    const Vector u = gaussian_vector(n, probe);
    const Vector v = gaussian_vector(op.output_dim(), probe);
    const double lhs = op.restrict(u).dot(v);
    const double rhs = u.dot(op.prolong(v));
    out.push_back(make("adjoint", "R" + std::to_string(o + 1),
                       std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), kExactTol));
  }

  if (plan.check_coverage) {
    std::set<Index> covered;
    for (const auto& op : plan.ops) covered.insert(op->indices().begin(), op->indices().end());
    out.push_back(make("coverage", "hierarchy", static_cast<double>(n - static_cast<Index>(covered.size())), 0.0));
  }
  return out;
}

std::string format_check_table(const std::vector<CheckResult>& results) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %-12s %12s %12s  %s\n", "check", "where", "error", "tolerance", "result");
  out << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-18s %-12s %12.3e %12.3e  %s\n", r.name.c_str(), r.where.c_str(), r.value,
                  r.tolerance, r.pass ? "PASS" : "FAIL");
    out << line;
  }
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.pass; });
  out << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
  return out.str();
}

int check_exit_code(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; }) ? 0 : 3;
}

}  // namespace amln::app
