#pragma once

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "amlnewton/restriction.hpp"
#include "amlnewton/types.hpp"

namespace amln {

using IndexSubset = std::vector<Index>;

/// Two-phase fixed subset family over {0, ..., n-1}.
///
/// Coverage phase (subsets 0..r-1): each subset draws uniformly without
/// replacement from the not-yet-covered indices first and tops up uniformly
/// from the rest, so the union of the first r subsets is the whole index set.
///
/// Overlap phase (subsets r..): draws without replacement with weights
/// 1 / (1 + c_j), where c_j counts the appearances of j in earlier subsets.
/// Weights are fixed for the duration of one subset.
///
/// Sizes may repeat; each must lie in [1, n). Throws InfeasibleCoverage if
/// dims[0] + ... + dims[r-1] < n.
std::vector<IndexSubset> build_coverage_overlap_hierarchy(Index n, const std::vector<Index>& dims, int r,
                                                          const RngSpec& rng);

/// Independent uniform subsets (no coverage guarantee).
std::vector<IndexSubset> build_uniform_subsets(Index n, const std::vector<Index>& dims, std::mt19937_64& rng);
std::vector<IndexSubset> build_uniform_subsets(Index n, const std::vector<Index>& dims, const RngSpec& rng);

/// Smallest r for which the first r dims can cover n, or nullopt.
std::optional<int> minimal_coverage_r(Index n, const std::vector<Index>& dims);

/// `count` coarse dims from ceil(lo*n) to ceil(hi*n), equally spaced (each
/// rounded up) and forced strictly increasing below n.
std::vector<Index> equidistant_coarse_dims(Index n, int count, double lo = 0.1, double hi = 0.3);

/// Every dimension from ceil(lo*n) up to n-1: the densest possible hierarchy.
std::vector<Index> span_coarse_dims(Index n, double lo = 0.1);

/// ceil(f*n) per fraction, forced strictly increasing below n.
std::vector<Index> dims_from_fractions(Index n, const std::vector<double>& fractions);

enum class HierarchyMode { Fixed, PerIteration };
enum class SketchKind { RowSampling, Gaussian };

/// A coarse level as scheduled for one iteration. `level` is the 1-based rank
/// of the level by dimension; the fine level is m = coarse count + 1.
struct ScheduledLevel {
  int level = 0;
  std::shared_ptr<const RestrictionOp> op;
};

/// Ordered coarse levels plus the implicit fine level (identity operator).
/// Immutable once built; `schedule` draws any per-iteration randomness from
/// the caller's engine.
class LevelHierarchy {
 public:
  static LevelHierarchy fine_only(Index n);
  /// Operators must have input dimension n and strictly increasing output dims.
  static LevelHierarchy fixed(Index n, std::vector<RestrictionOp> ops, bool permute = false);
  static LevelHierarchy per_iteration(Index n, std::vector<Index> dims, SketchKind kind = SketchKind::RowSampling,
                                      bool permute = false);

  Index fine_dim() const noexcept { return n_; }
  int levels() const noexcept { return static_cast<int>(dims_.size()) + 1; }
  int coarse_levels() const noexcept { return static_cast<int>(dims_.size()); }
  const std::vector<Index>& coarse_dims() const noexcept { return dims_; }
  HierarchyMode mode() const noexcept { return mode_; }
  bool permuted() const noexcept { return permute_; }
  SketchKind sketch_kind() const noexcept { return kind_; }
  const std::vector<std::shared_ptr<const RestrictionOp>>& fixed_ops() const noexcept { return ops_; }

  /// Coarse levels in scan order for one iteration: coarsest first, or a
  /// uniform random permutation when permutation is on. Per-iteration
  /// hierarchies draw fresh operators.
  std::vector<ScheduledLevel> schedule(std::mt19937_64& rng) const;

 private:
  LevelHierarchy(Index n, HierarchyMode mode) : n_(n), mode_(mode) {}

  Index n_;
  HierarchyMode mode_;
  SketchKind kind_ = SketchKind::RowSampling;
  bool permute_ = false;
  std::vector<Index> dims_;
  std::vector<std::shared_ptr<const RestrictionOp>> ops_;
};

struct HierarchySpec {
  std::vector<Index> coarse_dims;
  HierarchyMode mode = HierarchyMode::Fixed;
  SketchKind sketch = SketchKind::RowSampling;
  bool permute = false;
  std::optional<int> coverage_r;  // defaults to minimal_coverage_r
};

/// Fixed mode builds row-sampling operators from the coverage/overlap subsets
/// (or Gaussian sketches when requested); per-iteration mode defers to `schedule`.
LevelHierarchy build_hierarchy(Index n, const HierarchySpec& spec, const RngSpec& rng);

}  // namespace amln
