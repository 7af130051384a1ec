#pragma once

#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "amlnewton/diagnostics.hpp"
#include "amlnewton/problem.hpp"
#include "amlnewton/transfer.hpp"
#include "amlnewton/types.hpp"

namespace amln {

struct LineSearchConfig {
  double c1 = 1e-4;       // sufficient-decrease constant, (0, 1)
  double backtrack = 0.5;  // step contraction, (0, 1)
  double t0 = 1.0;
  int max_backtracks = 60;

  void validate() const;
};

struct LineSearchResult {
  double step = 0.0;
  Vector x;
  double value = 0.0;
  int backtracks = 0;
};

/// Backtracking Armijo search over t = t0 * backtrack^j, j = 0..max_backtracks:
/// returns the first t with F(x + t d) <= F(x) + c1 t <grad F(x), d>.
///
/// Trial points whose objective overflows are rejected. When the predicted
/// decrease c1 t0 |<g, d>| is below the resolution of F (10 eps max(1, |F|)),
/// the full step is accepted if F does not rise by more than that resolution.
/// d = 0 returns (0, x). Throws LineSearchFailed for ascent directions or
/// when every trial fails.
LineSearchResult armijo_search(const Objective& f, const Vector& x, const Vector& d, const LineSearchConfig& cfg);
LineSearchResult armijo_search(const Objective& f, const Vector& x, double fx, const Vector& gx, const Vector& d,
                               const LineSearchConfig& cfg);

enum class Algorithm { Newton, GradientDescent, MlNewton, AmlNewton, Rsn };

std::string_view to_string(Algorithm algorithm) noexcept;
Algorithm parse_algorithm(std::string_view text);

struct SolverConfig {
  Algorithm algorithm = Algorithm::AmlNewton;
  double sigma = 0.2;     // AML acceptance constant, (0, 1]
  double gamma = 0.2;     // ML-Newton: ||R g|| >= gamma ||g||
  double epsilon = 1e-8;  // ML-Newton: ||R g|| > epsilon
  double grad_tol = 1e-9;
  int max_iters = 100;
  std::shared_ptr<const LevelHierarchy> hierarchy;  // null means fine level only
  LineSearchConfig line_search;
  double cholesky_jitter = 1e-10;  // relative to the mean Hessian diagonal
  bool record_diagnostics = false;
  Index rsn_dim = 0;  // RSN subspace dimension; 0 means ceil(0.1 n)
  SketchKind rsn_sketch = SketchKind::RowSampling;
  RngSpec rng;

  void validate() const;
};

/// One row of a trace. Step rows describe the step taken from x_k; the final
/// row of a trace is terminal (level_chosen = 0, no step).
struct IterationRecord {
  int k = 0;
  double grad_norm = 0.0;  // ||grad F(x_k)||
  double f_value = 0.0;    // F(x_k)
  int level_chosen = 0;    // 1..m-1 coarse, m fine, 0 terminal
  int n_coarse_trials = 0;
  double step_size = 0.0;
  double wall_time_s = 0.0;
  Index level_dim = 0;
  double restricted_grad_norm = 0.0;  // ||R g_k|| for the chosen level
  double solve_cost = 0.0;            // sum of dim^3 over linear systems solved
};

enum class Termination { GradTol, MaxIters, NumericalFailure };

std::string_view to_string(Termination t) noexcept;

struct Trace {
  std::vector<IterationRecord> records;
  Termination terminated = Termination::MaxIters;
  Vector final_x;
  int fine_level = 1;
  std::string failure;
  std::vector<DecrementSample> diagnostics;

  int iterations() const;
  int coarse_steps() const;
  int fine_steps() const;
  double solve_cost() const;
  std::vector<double> grad_norms() const;
};

struct Iterate {
  Vector x;
  double f = 0.0;
  Vector g;
};

Iterate evaluate(const Objective& f, Vector x);

struct StepResult {
  Iterate next;
  IterationRecord record;
  std::vector<ScheduledLevel> schedule;  // coarse operators considered this step
};

/// Newton direction -hess^{-1} grad with the Cholesky jitter policy.
Vector newton_direction(const Objective& f, const Vector& x, double jitter);

/// -P (R hess P)^{-1} R grad, prolonged to length n.
Vector coarse_direction(const Objective& f, const Vector& x, const RestrictionOp& op, double jitter);

int fine_level(const SolverConfig& cfg);

StepResult newton_step(const Objective& f, const Iterate& at, const SolverConfig& cfg);
StepResult gradient_descent_step(const Objective& f, const Iterate& at, const SolverConfig& cfg);

/// Adaptive multilevel step. For each scheduled coarse level: skip unless
/// ||R g_k|| >= sigma ||g_k||; otherwise compute the damped coarse candidate
/// x+ and accept if ||R grad F(x+)|| >= sigma ||grad F(x+)||. Falls back to a
/// damped Newton step when no level is accepted.
StepResult aml_newton_step(const Objective& f, const Iterate& at, const LevelHierarchy& hierarchy,
                           const SolverConfig& cfg, std::mt19937_64& rng);

/// Classical multilevel step: first level with ||R g|| >= gamma ||g|| and
/// ||R g|| > epsilon, no lookahead; Newton otherwise.
StepResult ml_newton_step(const Objective& f, const Iterate& at, const LevelHierarchy& hierarchy,
                          const SolverConfig& cfg, std::mt19937_64& rng);

/// Randomized subspace Newton with a fresh operator every call.
StepResult rsn_step(const Objective& f, const Iterate& at, Index n_low, SketchKind kind, const SolverConfig& cfg,
                    std::mt19937_64& rng);

/// Runs the configured algorithm until ||grad F|| <= grad_tol or max_iters
/// steps. Step failures end the run with NumericalFailure; the partial trace
/// is still returned.
Trace solve(const Objective& f, const Vector& x0, const SolverConfig& cfg);

}  // namespace amln
