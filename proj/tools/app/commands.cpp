#include "app/commands.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "amlnewton/data_io.hpp"
#include "amlnewton/error.hpp"
#include "app/checks.hpp"

namespace amln::app {

namespace {

const AlgorithmSpec* first_with_hierarchy(const ExperimentConfig& cfg) {
  for (const auto& a : cfg.algorithms) {
    if (a.solver.algorithm == Algorithm::AmlNewton || a.solver.algorithm == Algorithm::MlNewton) return &a;
  }
  return nullptr;
}

bool comparable(const GlobalOptions& opts, std::size_t runs) { return opts.threads <= 1 || runs <= 1; }

int finish(const std::vector<RunResult>& runs, std::ostream& out) {
  int code = 0;
  for (const auto& r : runs) {
    out << r.name << ": " << to_string(r.trace.terminated) << " after " << r.trace.iterations() << " iterations ("
        << r.trace.coarse_steps() << " coarse, " << r.trace.fine_steps() << " fine), ||grad F|| = "
        << format_double(r.trace.records.empty() ? 0.0 : r.trace.records.back().grad_norm) << '\n';
    if (r.trace.terminated == Termination::NumericalFailure) {
      out << "  failure: " << r.trace.failure << '\n';
      code = 2;
    }
  }
  return code;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace

ExperimentConfig prepare_config(const std::filesystem::path& path, const GlobalOptions& opts) {
  ExperimentConfig cfg = load_config(path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out) cfg.output_dir = *opts.out;
  if (opts.threads < 1) throw ConfigError("--threads: must be >= 1");
  validate(cfg);
  return cfg;
}

PlotSeries plot_series(const std::string& label, const Trace& trace) {
  PlotSeries s;
  s.label = label;
  double elapsed = 0.0;
  for (const auto& r : trace.records) {
    s.iteration.push_back(r.k);
    s.seconds.push_back(elapsed);
    s.grad_norm.push_back(r.grad_norm);
    elapsed += r.wall_time_s;
  }
  return s;
}

int cmd_run(const std::filesystem::path& config, const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = prepare_config(config, opts);
    const auto problem = build_problem(cfg);
    const Vector x0 = initial_point(cfg, problem->dim());
    std::filesystem::create_directories(cfg.output_dir);

    const auto runs = run_algorithms(*problem, x0, cfg, cfg.algorithms, opts.threads);
    const bool fair = comparable(opts, runs.size());
    std::vector<PlotSeries> series;
    for (const auto& r : runs) {
      write_run_outputs(cfg.output_dir, r, fair);
      series.push_back(plot_series(r.name, r.trace));
    }
    write_text(cfg.output_dir / "convergence.svg", convergence_svg(series, "convergence"));
    return finish(runs, out);
  });
}

int cmd_gen_data(Index d, Index n, Index rank, std::uint64_t seed, Loss loss, const std::filesystem::path& path,
                 std::ostream& err) {
  return guarded(err, [&] {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_libsvm(generate_lowrank(d, n, rank, seed, loss), path);
    return 0;
  });
}

int check_objective(const Objective& f, const Vector& x0, const HierarchySettings* hierarchy, bool expect_spd,
                    std::uint64_t seed, std::ostream& out) {
  CheckPlan plan;
  plan.points = check_points(x0, 5, seed);
  plan.expect_spd = expect_spd;
  plan.seed = seed;
  if (hierarchy) {
    const auto h = make_hierarchy(*hierarchy, f.dim(), seed);
    if (h->mode() == HierarchyMode::Fixed) {
      plan.ops = h->fixed_ops();
      plan.check_coverage = !plan.ops.empty() && h->sketch_kind() == SketchKind::RowSampling;
    } else {
      auto rng = RngSpec{seed, 2}.engine();
      for (const auto& level : h->schedule(rng)) plan.ops.push_back(level.op);
    }
  }
  const auto results = run_checks(f, plan);
  out << format_check_table(results);
  return check_exit_code(results);
}

int cmd_check(const std::filesystem::path& config, const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = prepare_config(config, opts);
    const auto problem = build_problem(cfg);
    const Vector x0 = initial_point(cfg, problem->dim());
    const auto* algo = first_with_hierarchy(cfg);
    const bool spd = cfg.reg.l2 > 0.0 || cfg.reg.l1 > 0.0;
    return check_objective(*problem, x0, algo ? &algo->hierarchy : nullptr, spd, cfg.seed, out);
  });
}

int cmd_sigma_sweep(const std::filesystem::path& config, const std::vector<double>& sigmas, const GlobalOptions& opts,
                    std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig cfg = prepare_config(config, opts);
    if (sigmas.empty()) throw ConfigError("--sigmas: at least one value is required");
    AlgorithmSpec base;
    const auto it = std::find_if(cfg.algorithms.begin(), cfg.algorithms.end(),
                                 [](const auto& a) { return a.solver.algorithm == Algorithm::AmlNewton; });
    if (it != cfg.algorithms.end()) {
      base = *it;
    } else {
      base = cfg.algorithms.front();
      base.solver.algorithm = Algorithm::AmlNewton;
    }
    std::vector<AlgorithmSpec> sweep;
    for (double s : sigmas) {
      if (!(s > 0.0 && s <= 1.0)) throw ConfigError("--sigmas: sigma must lie in (0, 1], got " + format_double(s));
      AlgorithmSpec spec = base;
      spec.name = "sigma_" + format_double(s);
      spec.solver.sigma = s;
      sweep.push_back(std::move(spec));
    }
    cfg.algorithms = sweep;
    validate(cfg);

    const auto problem = build_problem(cfg);
    const Vector x0 = initial_point(cfg, problem->dim());
    std::filesystem::create_directories(cfg.output_dir);
    const auto runs = run_algorithms(*problem, x0, cfg, sweep, opts.threads);
    const bool fair = comparable(opts, runs.size());

    std::ostringstream table;
    table << "sigma,iterations,fine_steps,coarse_steps,quad_onset_k\n";
    std::vector<PlotSeries> series;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& r = runs[i];
      write_run_outputs(cfg.output_dir, r, fair);
      series.push_back(plot_series("sigma = " + format_double(sigmas[i]), r.trace));
      table << format_double(sigmas[i]) << ',' << r.trace.iterations() << ',' << r.trace.fine_steps() << ','
            << r.trace.coarse_steps() << ',';
      if (r.rate.quad_onset_k) table << *r.rate.quad_onset_k;
      table << '\n';
    }
    write_text(cfg.output_dir / "sigma_sweep.csv", table.str());
    write_text(cfg.output_dir / "sigma_sweep.svg", convergence_svg(series, "AML-Newton sigma sweep"));
    return finish(runs, out);
  });
}

}  // namespace amln::app
