#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "amlnewton/problem.hpp"
#include "amlnewton/restriction.hpp"

namespace amln::app {

struct CheckResult {
  std::string name;
  std::string where;
  double value = 0.0;      // measured error
  double tolerance = 0.0;
  bool pass = false;
};

struct CheckPlan {
  std::vector<Vector> points;
  std::vector<std::shared_ptr<const RestrictionOp>> ops;
  bool expect_spd = false;       // otherwise the Hessian only needs to be PSD
  bool check_coverage = false;   // ops are row-sampling subsets that must cover 0..n-1
  std::uint64_t seed = 0;        // for adjoint probe vectors
};

/// x0 followed by `extra` points x0 + N(0, I/n).
std::vector<Vector> check_points(const Vector& x0, int extra, std::uint64_t seed);

std::vector<CheckResult> run_checks(const Objective& f, const CheckPlan& plan);

/// Central-difference errors, relative to max(1, ||exact||).
double gradient_fd_error(const Objective& f, const Vector& x);
double hessian_fd_error(const Objective& f, const Vector& x);

std::string format_check_table(const std::vector<CheckResult>& results);

/// 0 when every check passed, 3 otherwise.
int check_exit_code(const std::vector<CheckResult>& results);

}  // namespace amln::app
