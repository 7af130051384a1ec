#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "amlnewton/data_io.hpp"
#include "amlnewton/diagnostics.hpp"
#include "amlnewton/problem.hpp"
#include "amlnewton/solvers.hpp"
#include "app/config.hpp"

namespace amln::app {

Dataset load_dataset(const ExperimentConfig& cfg);
std::unique_ptr<GlmProblem> build_problem(const ExperimentConfig& cfg);
Vector initial_point(const ExperimentConfig& cfg, Index n);

std::vector<Index> coarse_dims(const HierarchySettings& h, Index n);
std::shared_ptr<const LevelHierarchy> make_hierarchy(const HierarchySettings& h, Index n, std::uint64_t seed);

/// Fills in the hierarchy, RSN dimension and RNG streams for one algorithm.
/// Every algorithm sees the same hierarchy stream, so fixed hierarchies match
/// across algorithms of one experiment.
SolverConfig make_solver_config(const AlgorithmSpec& spec, const ExperimentConfig& cfg, Index n);

struct RunResult {
  std::string name;
  SolverConfig solver;
  Trace trace;
  RateReport rate;
};

RateReport rate_report(const Trace& trace);

/// Runs each algorithm from x0. threads > 1 runs algorithms concurrently.
std::vector<RunResult> run_algorithms(const Objective& f, const Vector& x0, const ExperimentConfig& cfg,
                                      const std::vector<AlgorithmSpec>& algorithms, int threads);

std::string format_double(double v);

std::string trace_csv(const Trace& trace);
std::string summary_json(const RunResult& run, bool wall_time_comparable);
std::string diagnostics_csv(const Trace& trace);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Writes <name>.trace.csv, <name>.summary.json and, when recorded,
/// <name>.diagnostics.csv into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunResult& run, bool wall_time_comparable);

}  // namespace amln::app
