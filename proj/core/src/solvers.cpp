#include "amlnewton/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "amlnewton/error.hpp"
#include "amlnewton/linalg.hpp"

namespace amln {

namespace {

using Clock = std::chrono::steady_clock;

double cube(Index n) {
  const auto d = static_cast<double>(n);
  return d * d * d;
}

template <class Fn>
auto with_level_context(int level, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "level " + std::to_string(level) + ": " + e.what(), e.location());
  }
}

Vector newton_direction_at(const Objective& f, const Iterate& at, double jitter) {
  return -solve_spd(f.hessian(at.x), at.g, jitter, Errc::SingularHessian);
}

StepResult damped_step(const Objective& f, const Iterate& at, const Vector& d, const SolverConfig& cfg) {
  LineSearchResult ls = armijo_search(f, at.x, at.f, at.g, d, cfg.line_search);
  StepResult out;
  out.record.step_size = ls.step;
  out.next.g = f.gradient(ls.x);
  out.next.x = std::move(ls.x);
  out.next.f = ls.value;
  return out;
}

StepResult fine_newton_step(const Objective& f, const Iterate& at, const SolverConfig& cfg, int m) {
  const Vector d = with_level_context(m, [&] { return newton_direction_at(f, at, cfg.cholesky_jitter); });
  StepResult out = with_level_context(m, [&] { return damped_step(f, at, d, cfg); });
  out.record.level_chosen = m;
  out.record.level_dim = f.dim();
  out.record.restricted_grad_norm = at.g.norm();
  out.record.solve_cost += cube(f.dim());
  return out;
}

const LevelHierarchy& hierarchy_or_fine(const SolverConfig& cfg, Index n, LevelHierarchy& fallback) {
  if (cfg.hierarchy) {
    if (cfg.hierarchy->fine_dim() != n) {
      throw Error(Errc::DimensionMismatch, "hierarchy fine dimension does not match the problem");
    }
    return *cfg.hierarchy;
  }
  fallback = LevelHierarchy::fine_only(n);
  return fallback;
}

DecrementSample sample_decrements(const Objective& f, int k, const Vector& x, const Iterate& next,
                                  const StepResult& step) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  DecrementSample s;
  s.k = k;
  s.accepted_level = step.record.level_chosen;
  auto guarded = [&](auto&& fn) {
    try {
      return fn();
    } catch (const Error&) {
      return kNaN;
    }
  };
  s.lambda_k = guarded([&] { return newton_decrement(f, x); });
  s.lambda_next = guarded([&] { return newton_decrement(f, next.x); });
  const Vector g_now = f.gradient(x);
  for (const auto& level : step.schedule) {
    const RestrictionOp& op = *level.op;
    s.levels.push_back(level.level);
    s.dims.push_back(op.output_dim());
    s.lambda_hat.push_back(guarded([&] { return approximate_decrement(f, x, op); }));
    s.g_next.push_back(guarded([&] { return g_next_level(f, next.x, op); }));
    s.rg_now.push_back(op.restrict(g_now).norm());
    s.rg_next.push_back(op.restrict(next.g).norm());
  }
  return s;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::Newton: return "newton";
    case Algorithm::GradientDescent: return "gd";
    case Algorithm::MlNewton: return "ml";
    case Algorithm::AmlNewton: return "aml";
    case Algorithm::Rsn: return "rsn";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "newton") return Algorithm::Newton;
  if (text == "gd") return Algorithm::GradientDescent;
  if (text == "ml") return Algorithm::MlNewton;
  if (text == "aml") return Algorithm::AmlNewton;
  if (text == "rsn") return Algorithm::Rsn;
  throw Error(Errc::InvalidArgument, "unknown algorithm '" + std::string(text) + "' (newton, gd, ml, aml, rsn)");
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::GradTol: return "GradTol";
    case Termination::MaxIters: return "MaxIters";
    case Termination::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw Error(Errc::InvalidArgument, "sigma must lie in (0, 1]");
  if (!(gamma > 0.0)) throw Error(Errc::InvalidArgument, "gamma must be positive");
  if (!(epsilon >= 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be nonnegative");
  if (!(grad_tol > 0.0)) throw Error(Errc::InvalidArgument, "grad_tol must be positive");
  if (max_iters < 1) throw Error(Errc::InvalidArgument, "max_iters must be >= 1");
  if (!(cholesky_jitter >= 0.0)) throw Error(Errc::InvalidArgument, "cholesky_jitter must be nonnegative");
  if (rsn_dim < 0) throw Error(Errc::InvalidArgument, "rsn_dim must be nonnegative");
  line_search.validate();
}

int Trace::iterations() const {
  int n = 0;
  for (const auto& r : records) n += r.level_chosen != 0;
  return n;
}

int Trace::coarse_steps() const {
  int n = 0;
  for (const auto& r : records) n += r.n_coarse_trials;
  return n;
}

int Trace::fine_steps() const {
  int n = 0;
  for (const auto& r : records) n += r.level_chosen == fine_level;
  return n;
}

double Trace::solve_cost() const {
  double total = 0.0;
  for (const auto& r : records) total += r.solve_cost;
  return total;
}

std::vector<double> Trace::grad_norms() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.grad_norm);
  return out;
}

Iterate evaluate(const Objective& f, Vector x) {
  Iterate it;
  it.f = f.value(x);
  it.g = f.gradient(x);
  it.x = std::move(x);
  return it;
}

Vector newton_direction(const Objective& f, const Vector& x, double jitter) {
  return -solve_spd(f.hessian(x), f.gradient(x), jitter, Errc::SingularHessian);
}

Vector coarse_direction(const Objective& f, const Vector& x, const RestrictionOp& op, double jitter) {
  const ReducedModel model = f.reduced(x, op);
  return op.prolong(-solve_spd(model.hessian, model.gradient, jitter, Errc::SingularReducedHessian));
}

int fine_level(const SolverConfig& cfg) {
  if (cfg.algorithm == Algorithm::Rsn) return 2;
  return cfg.hierarchy ? cfg.hierarchy->levels() : 1;
}

StepResult newton_step(const Objective& f, const Iterate& at, const SolverConfig& cfg) {
  return fine_newton_step(f, at, cfg, fine_level(cfg));
}

StepResult gradient_descent_step(const Objective& f, const Iterate& at, const SolverConfig& cfg) {
  StepResult out = damped_step(f, at, -at.g, cfg);
  out.record.level_chosen = fine_level(cfg);
  out.record.level_dim = f.dim();
  out.record.restricted_grad_norm = at.g.norm();
  return out;
}

StepResult aml_newton_step(const Objective& f, const Iterate& at, const LevelHierarchy& hierarchy,
                           const SolverConfig& cfg, std::mt19937_64& rng) {
  auto schedule = hierarchy.schedule(rng);
  const double g_norm = at.g.norm();
  int trials = 0;
  double cost = 0.0;

  for (const auto& level : schedule) {
    const RestrictionOp& op = *level.op;
    const double rg_norm = op.restrict(at.g).norm();
    if (rg_norm < cfg.sigma * g_norm) continue;

    StepResult candidate = with_level_context(level.level, [&] {
      const Vector d = coarse_direction(f, at.x, op, cfg.cholesky_jitter);
      ++trials;
      cost += cube(op.output_dim());
      return damped_step(f, at, d, cfg);
    });
    const double rg_next = op.restrict(candidate.next.g).norm();
    if (rg_next >= cfg.sigma * candidate.next.g.norm()) {
      candidate.record.level_chosen = level.level;
      candidate.record.level_dim = op.output_dim();
      candidate.record.restricted_grad_norm = rg_norm;
      candidate.record.n_coarse_trials = trials;
      candidate.record.solve_cost = cost;
      candidate.schedule = std::move(schedule);
      return candidate;
    }
  }

  StepResult out = fine_newton_step(f, at, cfg, hierarchy.levels());
  out.record.n_coarse_trials = trials;
  out.record.solve_cost += cost;
  out.schedule = std::move(schedule);
  return out;
}

StepResult ml_newton_step(const Objective& f, const Iterate& at, const LevelHierarchy& hierarchy,
                          const SolverConfig& cfg, std::mt19937_64& rng) {
  auto schedule = hierarchy.schedule(rng);
  const double g_norm = at.g.norm();
  for (const auto& level : schedule) {
    const RestrictionOp& op = *level.op;
    const double rg_norm = op.restrict(at.g).norm();
    if (!(rg_norm >= cfg.gamma * g_norm && rg_norm > cfg.epsilon)) continue;

    StepResult out = with_level_context(level.level, [&] {
      return damped_step(f, at, coarse_direction(f, at.x, op, cfg.cholesky_jitter), cfg);
    });
    out.record.level_chosen = level.level;
    out.record.level_dim = op.output_dim();
    out.record.restricted_grad_norm = rg_norm;
    out.record.n_coarse_trials = 1;
    out.record.solve_cost = cube(op.output_dim());
    out.schedule = std::move(schedule);
    return out;
  }
  StepResult out = fine_newton_step(f, at, cfg, hierarchy.levels());
  out.schedule = std::move(schedule);
  return out;
}

StepResult rsn_step(const Objective& f, const Iterate& at, Index n_low, SketchKind kind, const SolverConfig& cfg,
                    std::mt19937_64& rng) {
  const Index n = f.dim();
  if (n_low < 1 || n_low > n) {
    throw Error(Errc::InvalidArgument, "RSN dimension must lie in [1, " + std::to_string(n) + "]");
  }
  auto op = kind == SketchKind::RowSampling
                ? std::make_shared<const RestrictionOp>(
                      RestrictionOp::row_sampling(std::move(build_uniform_subsets(n, {n_low}, rng).front()), n))
                : std::make_shared<const RestrictionOp>(make_gaussian_sketch(n_low, n, rng));
  const int level = op->is_full_space() ? 2 : 1;

  StepResult out = with_level_context(level, [&] {
    return damped_step(f, at, coarse_direction(f, at.x, *op, cfg.cholesky_jitter), cfg);
  });
  out.record.level_chosen = level;
  out.record.level_dim = n_low;
  out.record.restricted_grad_norm = op->restrict(at.g).norm();
  out.record.n_coarse_trials = level == 1 ? 1 : 0;
  out.record.solve_cost = cube(n_low);
  out.schedule.push_back({level, std::move(op)});
  return out;
}

Trace solve(const Objective& f, const Vector& x0, const SolverConfig& cfg) {
  cfg.validate();
  const Index n = f.dim();
  if (x0.size() != n) throw Error(Errc::DimensionMismatch, "x0 length does not match the problem dimension");
  if (!x0.allFinite()) throw Error(Errc::InvalidArgument, "x0 must be finite");

  Trace trace;
  trace.fine_level = fine_level(cfg);
  LevelHierarchy fallback = LevelHierarchy::fine_only(n);
  const LevelHierarchy& hierarchy = hierarchy_or_fine(cfg, n, fallback);
  const Index rsn_dim = cfg.rsn_dim > 0 ? cfg.rsn_dim : std::max<Index>(1, (n + 9) / 10);
  auto rng = cfg.rng.engine();

  Iterate it;
  try {
    it = evaluate(f, x0);
  } catch (const Error& e) {
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    trace.records.push_back({0, kNaN, kNaN});
    trace.terminated = Termination::NumericalFailure;
    trace.failure = e.what();
    trace.final_x = x0;
    return trace;
  }

  for (int k = 0;; ++k) {
    IterationRecord base;
    base.k = k;
    base.grad_norm = it.g.norm();
    base.f_value = it.f;
    if (base.grad_norm <= cfg.grad_tol) {
      trace.records.push_back(base);
      trace.terminated = Termination::GradTol;
      break;
    }
    if (k >= cfg.max_iters) {
      trace.records.push_back(base);
      trace.terminated = Termination::MaxIters;
      break;
    }

    const auto started = Clock::now();
    StepResult step;
    try {
      switch (cfg.algorithm) {
        case Algorithm::Newton: step = newton_step(f, it, cfg); break;
        case Algorithm::GradientDescent: step = gradient_descent_step(f, it, cfg); break;
        case Algorithm::MlNewton: step = ml_newton_step(f, it, hierarchy, cfg, rng); break;
        case Algorithm::AmlNewton: step = aml_newton_step(f, it, hierarchy, cfg, rng); break;
        case Algorithm::Rsn: step = rsn_step(f, it, std::min(rsn_dim, n), cfg.rsn_sketch, cfg, rng); break;
      }
    } catch (const Error& e) {
      trace.records.push_back(base);
      trace.terminated = Termination::NumericalFailure;
      trace.failure = e.what();
      break;
    }
    const std::chrono::duration<double> elapsed = Clock::now() - started;

    IterationRecord record = step.record;
    record.k = k;
    record.grad_norm = base.grad_norm;
    record.f_value = base.f_value;
    record.wall_time_s = elapsed.count();
    trace.records.push_back(record);

    if (cfg.record_diagnostics) trace.diagnostics.push_back(sample_decrements(f, k, it.x, step.next, step));
    it = std::move(step.next);
  }
  trace.final_x = std::move(it.x);
  return trace;
}

}  // namespace amln
