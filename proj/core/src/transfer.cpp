#include "amlnewton/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "amlnewton/error.hpp"

namespace amln {

namespace {

// ceil(f * n), tolerant of representation error such as 0.1 * 60 = 6.000000000000001.
Index ceil_fraction(double f, Index n) {
  const double v = f * static_cast<double>(n);
  return static_cast<Index>(std::ceil(v - 1e-9 * std::max(1.0, std::abs(v))));
}

void validate_dims(Index n, const std::vector<Index>& dims, bool strictly_increasing) {
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1 || dims[i] >= n) {
      throw Error(Errc::InvalidArgument, "coarse dimension " + std::to_string(dims[i]) + " outside [1, " +
                                             std::to_string(n) + ")");
    }
    if (strictly_increasing && i > 0 && dims[i] <= dims[i - 1]) {
      throw Error(Errc::InvalidArgument, "coarse dimensions must be strictly increasing");
    }
  }
}

// Partial Fisher-Yates: k uniformly chosen elements of pool, pool order destroyed.
std::vector<Index> sample_without_replacement(std::vector<Index>& pool, std::size_t k, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::vector<Index> make_increasing(std::vector<Index> dims, Index n) {
  for (std::size_t i = 0; i < dims.size(); ++i) {
    dims[i] = std::max<Index>(dims[i], 1);
    if (i > 0) dims[i] = std::max(dims[i], dims[i - 1] + 1);
  }
  if (!dims.empty() && dims.back() >= n) {
    throw Error(Errc::InvalidArgument, "n = " + std::to_string(n) + " is too small for " +
                                           std::to_string(dims.size()) + " distinct coarse levels");
  }
  return dims;
}

}  // namespace

std::optional<int> minimal_coverage_r(Index n, const std::vector<Index>& dims) {
  Index total = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    total += dims[i];
    if (total >= n) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

std::vector<IndexSubset> build_coverage_overlap_hierarchy(Index n, const std::vector<Index>& dims, int r,
                                                          const RngSpec& rng_spec) {
  validate_dims(n, dims, false);
  if (r < 1 || r > static_cast<int>(dims.size())) {
    throw Error(Errc::InvalidArgument, "coverage r must lie in [1, " + std::to_string(dims.size()) + "]");
  }
  const Index coverable = std::accumulate(dims.begin(), dims.begin() + r, Index{0});
  if (coverable < n) {
    throw Error(Errc::InfeasibleCoverage, "first " + std::to_string(r) + " subsets hold " +
                                              std::to_string(coverable) + " < n = " + std::to_string(n) +
                                              " indices");
  }

  auto rng = rng_spec.engine();
  std::vector<IndexSubset> subsets;
  subsets.reserve(dims.size());
  std::vector<int> counts(static_cast<std::size_t>(n), 0);

  for (int i = 0; i < r; ++i) {
    const auto k = static_cast<std::size_t>(dims[static_cast<std::size_t>(i)]);
    std::vector<Index> uncovered;
    for (Index j = 0; j < n; ++j) {
      if (counts[static_cast<std::size_t>(j)] == 0) uncovered.push_back(j);
    }
    IndexSubset subset = sample_without_replacement(uncovered, std::min(k, uncovered.size()), rng);
    if (subset.size() < k) {
      std::vector<char> taken(static_cast<std::size_t>(n), 0);
      for (Index j : subset) taken[static_cast<std::size_t>(j)] = 1;
      std::vector<Index> rest;
      for (Index j = 0; j < n; ++j) {
        if (!taken[static_cast<std::size_t>(j)]) rest.push_back(j);
      }
      const auto top_up = sample_without_replacement(rest, k - subset.size(), rng);
      subset.insert(subset.end(), top_up.begin(), top_up.end());
    }
    std::sort(subset.begin(), subset.end());
    for (Index j : subset) ++counts[static_cast<std::size_t>(j)];
    subsets.push_back(std::move(subset));
  }

  // Weighted sampling without replacement via exponential keys E_j / w_j:
  // ordering by key reproduces successive weighted draws.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = static_cast<std::size_t>(r); i < dims.size(); ++i) {
    std::vector<std::pair<double, Index>> keys(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
      const double weight = 1.0 / (1.0 + counts[static_cast<std::size_t>(j)]);
      keys[static_cast<std::size_t>(j)] = {-std::log(unit(rng)) / weight, j};
    }
    const auto k = static_cast<std::ptrdiff_t>(dims[i]);
    std::nth_element(keys.begin(), keys.begin() + k - 1, keys.end());
    IndexSubset subset;
    subset.reserve(static_cast<std::size_t>(k));
    for (std::ptrdiff_t q = 0; q < k; ++q) subset.push_back(keys[static_cast<std::size_t>(q)].second);
    std::sort(subset.begin(), subset.end());
    for (Index j : subset) ++counts[static_cast<std::size_t>(j)];
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

std::vector<IndexSubset> build_uniform_subsets(Index n, const std::vector<Index>& dims, std::mt19937_64& rng) {
  std::vector<IndexSubset> subsets;
  subsets.reserve(dims.size());
  std::vector<Index> pool(static_cast<std::size_t>(n));
  for (Index dim : dims) {
    if (dim < 1 || dim > n) {
      throw Error(Errc::InvalidArgument, "subset size " + std::to_string(dim) + " outside [1, " +
                                             std::to_string(n) + "]");
    }
    std::iota(pool.begin(), pool.end(), Index{0});
    IndexSubset subset = sample_without_replacement(pool, static_cast<std::size_t>(dim), rng);
    std::sort(subset.begin(), subset.end());
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

std::vector<IndexSubset> build_uniform_subsets(Index n, const std::vector<Index>& dims, const RngSpec& rng) {
  auto engine = rng.engine();
  return build_uniform_subsets(n, dims, engine);
}

std::vector<Index> equidistant_coarse_dims(Index n, int count, double lo, double hi) {
  if (count <= 0) return {};
  const Index a = ceil_fraction(lo, n);
  const Index b = ceil_fraction(hi, n);
  std::vector<Index> dims;
  for (int i = 0; i < count; ++i) {
    if (count == 1) {
      dims.push_back(a);
      break;
    }
    const double v = static_cast<double>(a) + static_cast<double>(b - a) * i / (count - 1);
    dims.push_back(static_cast<Index>(std::ceil(v - 1e-9)));
  }
  return make_increasing(std::move(dims), n);
}

std::vector<Index> span_coarse_dims(Index n, double lo) {
  std::vector<Index> dims;
  for (Index d = std::max<Index>(1, ceil_fraction(lo, n)); d < n; ++d) dims.push_back(d);
  return dims;
}

std::vector<Index> dims_from_fractions(Index n, const std::vector<double>& fractions) {
  std::vector<Index> dims;
  for (double f : fractions) {
    if (!(f > 0.0 && f < 1.0)) throw Error(Errc::InvalidArgument, "dimension fractions must lie in (0, 1)");
    dims.push_back(ceil_fraction(f, n));
  }
  return make_increasing(std::move(dims), n);
}

LevelHierarchy LevelHierarchy::fine_only(Index n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "hierarchy needs n >= 1");
  return LevelHierarchy(n, HierarchyMode::Fixed);
}

LevelHierarchy LevelHierarchy::fixed(Index n, std::vector<RestrictionOp> ops, bool permute) {
  LevelHierarchy h = fine_only(n);
  h.permute_ = permute;
  for (auto& op : ops) {
    if (op.input_dim() != n) {
      throw Error(Errc::DimensionMismatch, "level operator input dimension " + std::to_string(op.input_dim()) +
                                               " != " + std::to_string(n));
    }
    if (!h.dims_.empty() && op.output_dim() <= h.dims_.back()) {
      throw Error(Errc::InvalidArgument, "level dimensions must be strictly increasing");
    }
    h.dims_.push_back(op.output_dim());
    h.ops_.push_back(std::make_shared<const RestrictionOp>(std::move(op)));
  }
  return h;
}

LevelHierarchy LevelHierarchy::per_iteration(Index n, std::vector<Index> dims, SketchKind kind, bool permute) {
  LevelHierarchy h = fine_only(n);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1 || dims[i] > n || (i > 0 && dims[i] <= dims[i - 1])) {
      throw Error(Errc::InvalidArgument, "level dimensions must be strictly increasing within [1, n]");
    }
  }
  h.mode_ = HierarchyMode::PerIteration;
  h.kind_ = kind;
  h.permute_ = permute;
  h.dims_ = std::move(dims);
  return h;
}

std::vector<ScheduledLevel> LevelHierarchy::schedule(std::mt19937_64& rng) const {
  std::vector<ScheduledLevel> out;
  out.reserve(dims_.size());
  if (mode_ == HierarchyMode::Fixed) {
    for (std::size_t i = 0; i < ops_.size(); ++i) out.push_back({static_cast<int>(i + 1), ops_[i]});
  } else if (kind_ == SketchKind::RowSampling) {
    auto subsets = build_uniform_subsets(n_, dims_, rng);
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      out.push_back({static_cast<int>(i + 1),
                     std::make_shared<const RestrictionOp>(RestrictionOp::row_sampling(std::move(subsets[i]), n_))});
    }
  } else {
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      out.push_back({static_cast<int>(i + 1),
                     std::make_shared<const RestrictionOp>(make_gaussian_sketch(dims_[i], n_, rng))});
    }
  }
  if (permute_) std::shuffle(out.begin(), out.end(), rng);
  return out;
}

LevelHierarchy build_hierarchy(Index n, const HierarchySpec& spec, const RngSpec& rng) {
  if (spec.coarse_dims.empty()) return LevelHierarchy::fine_only(n);
  validate_dims(n, spec.coarse_dims, true);
  if (spec.mode == HierarchyMode::PerIteration) {
    return LevelHierarchy::per_iteration(n, spec.coarse_dims, spec.sketch, spec.permute);
  }
  std::vector<RestrictionOp> ops;
  if (spec.sketch == SketchKind::Gaussian) {
    auto engine = rng.engine();
    for (Index dim : spec.coarse_dims) ops.push_back(make_gaussian_sketch(dim, n, engine));
  } else {
    const auto r = spec.coverage_r ? spec.coverage_r : minimal_coverage_r(n, spec.coarse_dims);
    if (!r) {
      throw Error(Errc::InfeasibleCoverage, "coarse dimensions sum to less than n = " + std::to_string(n));
    }
    for (auto& subset : build_coverage_overlap_hierarchy(n, spec.coarse_dims, *r, rng)) {
      ops.push_back(RestrictionOp::row_sampling(std::move(subset), n));
    }
  }
  return LevelHierarchy::fixed(n, std::move(ops), spec.permute);
}

}  // namespace amln
