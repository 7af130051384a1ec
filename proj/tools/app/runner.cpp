#include "app/runner.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "amlnewton/error.hpp"

namespace amln::app {

namespace {

constexpr std::uint64_t kHierarchyStream = 1;
constexpr std::uint64_t kSolverStream = 2;
constexpr std::uint64_t kInitStream = 3;

bool uses_hierarchy(Algorithm a) { return a == Algorithm::AmlNewton || a == Algorithm::MlNewton; }

}  // namespace

Dataset load_dataset(const ExperimentConfig& cfg) {
  const auto& src = cfg.source;
  Dataset data;
  switch (src.kind) {
    case DataSourceSpec::Kind::Generated:
      data = generate_lowrank(src.d, src.n, src.rank, src.seed.value_or(cfg.seed), cfg.loss);
      break;
    case DataSourceSpec::Kind::Libsvm:
      data = parse_libsvm(src.path, cfg.loss, src.n_features);
      break;
    case DataSourceSpec::Kind::Csv:
      data = parse_csv(src.path, src.label_column, src.has_header, cfg.loss);
      break;
  }
  if (src.standardize) data = standardize(data).data;
  return data;
}

std::unique_ptr<GlmProblem> build_problem(const ExperimentConfig& cfg) {
  return std::make_unique<GlmProblem>(load_dataset(cfg), cfg.loss, cfg.reg);
}

Vector initial_point(const ExperimentConfig& cfg, Index n) {
  if (cfg.x0 == InitKind::Zero) return Vector::Zero(n);
  auto rng = RngSpec{cfg.x0_seed.value_or(cfg.seed), kInitStream}.engine();
  return gaussian_vector(n, rng, 1.0 / std::sqrt(static_cast<double>(n)));
}

std::vector<Index> coarse_dims(const HierarchySettings& h, Index n) {
  switch (h.geometry) {
    case Geometry::Span:
      return span_coarse_dims(n, h.lo);
    case Geometry::Fractions:
      return dims_from_fractions(n, h.fractions);
    case Geometry::Equidistant:
      break;
  }
  return equidistant_coarse_dims(n, h.levels - 1, h.lo, h.hi);
}

std::shared_ptr<const LevelHierarchy> make_hierarchy(const HierarchySettings& h, Index n, std::uint64_t seed) {
  if (h.geometry == Geometry::Equidistant && h.levels <= 1) {
    return std::make_shared<LevelHierarchy>(LevelHierarchy::fine_only(n));
  }
  HierarchySpec spec;
  spec.coarse_dims = coarse_dims(h, n);
  spec.mode = h.mode;
  spec.sketch = h.sketch;
  spec.permute = h.permute;
  spec.coverage_r = h.coverage_r;
  return std::make_shared<LevelHierarchy>(build_hierarchy(n, spec, RngSpec{seed, kHierarchyStream}));
}

SolverConfig make_solver_config(const AlgorithmSpec& spec, const ExperimentConfig& cfg, Index n) {
  SolverConfig solver = spec.solver;
  solver.rng = RngSpec{cfg.seed, kSolverStream};
  if (uses_hierarchy(solver.algorithm)) solver.hierarchy = make_hierarchy(spec.hierarchy, n, cfg.seed);
  if (solver.algorithm == Algorithm::Rsn) {
    if (solver.rsn_dim == 0) {
      solver.rsn_dim = std::max<Index>(1, static_cast<Index>(std::ceil(spec.rsn_fraction * static_cast<double>(n) - 1e-9)));
    }
    solver.rsn_dim = std::min(solver.rsn_dim, n);
  }
  solver.validate();
  return solver;
}

RateReport rate_report(const Trace& trace) {
  const auto g = trace.grad_norms();
  if (g.size() < 3) return {};
  return fit_quadratic_phase(g, 1e-13 * g.front());
}

std::vector<RunResult> run_algorithms(const Objective& f, const Vector& x0, const ExperimentConfig& cfg,
                                      const std::vector<AlgorithmSpec>& algorithms, int threads) {
  std::vector<RunResult> results(algorithms.size());
  // Hierarchies are built up front so that configuration errors surface before any run starts.
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    results[i].name = algorithms[i].name;
    results[i].solver = make_solver_config(algorithms[i], cfg, f.dim());
  }
  auto run_one = [&](std::size_t i) {
    results[i].trace = solve(f, x0, results[i].solver);
    results[i].rate = rate_report(results[i].trace);
  };
  if (threads <= 1 || algorithms.size() <= 1) {
    for (std::size_t i = 0; i < algorithms.size(); ++i) run_one(i);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), algorithms.size());
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < algorithms.size(); i = next++) {
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream out;
  out << "k,grad_norm,f_value,level_chosen,n_coarse_trials,step_size,wall_time_s\n";
  for (const auto& r : trace.records) {
    out << r.k << ',' << format_double(r.grad_norm) << ',' << format_double(r.f_value) << ',' << r.level_chosen << ','
        << r.n_coarse_trials << ',' << format_double(r.step_size) << ',' << format_double(r.wall_time_s) << '\n';
  }
  return out.str();
}

std::string summary_json(const RunResult& run, bool wall_time_comparable) {
  const auto& t = run.trace;
  double wall = 0.0;
  for (const auto& r : t.records) wall += r.wall_time_s;
  nlohmann::ordered_json j;
  j["algorithm"] = run.name;
  j["type"] = std::string(to_string(run.solver.algorithm));
  j["terminated"] = std::string(to_string(t.terminated));
  if (!t.failure.empty()) j["failure"] = t.failure;
  j["iterations"] = t.iterations();
  j["coarse_steps"] = t.coarse_steps();
  j["fine_steps"] = t.fine_steps();
  j["fine_level"] = t.fine_level;
  j["solve_cost"] = t.solve_cost();
  j["final_grad_norm"] = t.records.empty() ? 0.0 : t.records.back().grad_norm;
  j["final_f_value"] = t.records.empty() ? 0.0 : t.records.back().f_value;
  j["total_wall_time_s"] = wall;
  j["wall_time_comparable"] = wall_time_comparable;
  if (run.solver.algorithm == Algorithm::AmlNewton) j["sigma"] = run.solver.sigma;
  if (run.solver.hierarchy) {
    j["levels"] = run.solver.hierarchy->levels();
    j["coarse_dims"] = run.solver.hierarchy->coarse_dims();
  }
  nlohmann::ordered_json rate;
  rate["quad_onset_k"] = run.rate.quad_onset_k ? nlohmann::ordered_json(*run.rate.quad_onset_k) : nlohmann::ordered_json();
  rate["c_fit"] = run.rate.c_fit;
  rate["digits_doubling"] = run.rate.digits_doubling;
  rate["tail_len"] = run.rate.tail_len;
  j["rate"] = rate;
  return j.dump(2) + "\n";
}

std::string diagnostics_csv(const Trace& trace) {
  std::ostringstream out;
  out << "k,level,dim,lambda_k,lambda_hat,lambda_next,g_next,rg_now,rg_next,a_ik,accepted_level\n";
  for (const auto& s : trace.diagnostics) {
    const auto ratios = aik_ratios(s.rg_now, s.rg_next);
    for (std::size_t i = 0; i < s.levels.size(); ++i) {
      out << s.k << ',' << s.levels[i] << ',' << s.dims[i] << ',' << format_double(s.lambda_k) << ','
          << format_double(s.lambda_hat[i]) << ',' << format_double(s.lambda_next) << ',' << format_double(s.g_next[i])
          << ',' << format_double(s.rg_now[i]) << ',' << format_double(s.rg_next[i]) << ','
          << format_double(ratios[i].value) << ',' << s.accepted_level << '\n';
    }
  }
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(Errc::IoError, "failed writing '" + path.string() + "'");
}

void write_run_outputs(const std::filesystem::path& dir, const RunResult& run, bool wall_time_comparable) {
  write_text(dir / (run.name + ".trace.csv"), trace_csv(run.trace));
  write_text(dir / (run.name + ".summary.json"), summary_json(run, wall_time_comparable));
  if (!run.trace.diagnostics.empty()) write_text(dir / (run.name + ".diagnostics.csv"), diagnostics_csv(run.trace));
}

}  // namespace amln::app
