#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "amlnewton/problem.hpp"
#include "amlnewton/solvers.hpp"
#include "amlnewton/transfer.hpp"

namespace amln::app {

/// Raised for unreadable, malformed or invalid experiment configs. The
/// message always names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataSourceSpec {
  enum class Kind { Generated, Libsvm, Csv };
  Kind kind = Kind::Generated;
  std::filesystem::path path;
  int label_column = 0;
  bool has_header = false;
  std::optional<Index> n_features;
  Index d = 0;
  Index n = 0;
  Index rank = 10;
  std::optional<std::uint64_t> seed;  // defaults to the experiment seed
  bool standardize = false;
};

enum class InitKind { Zero, Gaussian };

enum class Geometry { Equidistant, Span, Fractions };

struct HierarchySettings {
  int levels = 6;  // m, including the fine level
  Geometry geometry = Geometry::Equidistant;
  double lo = 0.1;
  double hi = 0.3;
  std::vector<double> fractions;
  HierarchyMode mode = HierarchyMode::Fixed;
  SketchKind sketch = SketchKind::RowSampling;
  bool permute = false;
  std::optional<int> coverage_r;
};

struct AlgorithmSpec {
  std::string name;
  SolverConfig solver;  // hierarchy and rng are filled in by the runner
  HierarchySettings hierarchy;
  double rsn_fraction = 0.1;
};

struct ExperimentConfig {
  DataSourceSpec source;
  Loss loss = Loss::Logistic;
  Regularization reg;
  InitKind x0 = InitKind::Zero;
  std::optional<std::uint64_t> x0_seed;
  double grad_tol = 1e-9;
  int max_iters = 100;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  std::vector<AlgorithmSpec> algorithms;
};

/// Parses the INI-style experiment format: top-level keys, an optional
/// [data] and [hierarchy] section, and one [algorithm NAME] section per run.
/// Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the first invalid field.
void validate(const ExperimentConfig& cfg);

}  // namespace amln::app
