#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "amlnewton/problem.hpp"
#include "app/config.hpp"
#include "app/runner.hpp"
#include "app/svg_plot.hpp"

namespace amln::app {

/// Flags shared by every verb. They override the matching config keys.
struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  int threads = 1;
};

/// Loads, applies overrides and validates. Throws ConfigError.
ExperimentConfig prepare_config(const std::filesystem::path& path, const GlobalOptions& opts);

/// Exit codes: 0 success, 1 config or IO error, 2 some run hit a numerical failure.
int cmd_run(const std::filesystem::path& config, const GlobalOptions& opts, std::ostream& out, std::ostream& err);

int cmd_gen_data(Index d, Index n, Index rank, std::uint64_t seed, Loss loss, const std::filesystem::path& path,
                 std::ostream& err);

/// Exit codes: 0 all checks pass, 1 config or load error, 3 some check failed.
int cmd_check(const std::filesystem::path& config, const GlobalOptions& opts, std::ostream& out, std::ostream& err);

/// Same checks on an already built objective and hierarchy; returns 0 or 3.
int check_objective(const Objective& f, const Vector& x0, const HierarchySettings* hierarchy, bool expect_spd,
                    std::uint64_t seed, std::ostream& out);

/// Exit codes as cmd_run.
int cmd_sigma_sweep(const std::filesystem::path& config, const std::vector<double>& sigmas, const GlobalOptions& opts,
                    std::ostream& out, std::ostream& err);

PlotSeries plot_series(const std::string& label, const Trace& trace);

}  // namespace amln::app
