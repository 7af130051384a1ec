#include "amlnewton/types.hpp"

namespace amln {

std::mt19937_64 RngSpec::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Vector gaussian_vector(Index size, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  Vector v(size);
  for (Index i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

}  // namespace amln
