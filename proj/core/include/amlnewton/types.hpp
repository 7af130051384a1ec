#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace amln {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Seed plus stream id. Identical specs reproduce identical random sequences.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::mt19937_64 engine() const;
  RngSpec with_stream(std::uint64_t s) const { return {seed, s}; }
};

/// i.i.d. N(0, stddev^2) entries.
Vector gaussian_vector(Index size, std::mt19937_64& rng, double stddev = 1.0);

}  // namespace amln
