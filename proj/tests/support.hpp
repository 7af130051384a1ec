#pragma once

#include <atomic>
#include <cmath>
#include <random>

#include "amlnewton/problem.hpp"
#include "amlnewton/types.hpp"

namespace amln::testing {

inline Dataset random_dataset(Index d, Index n, Loss loss, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Dataset data;
  data.features = Matrix(d, n);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < n; ++j) data.features(i, j) = normal(rng) / std::sqrt(static_cast<double>(n));
  }
  data.labels = Vector(d);
  std::uniform_int_distribution<int> coin(0, 1);
  std::poisson_distribution<int> counts(1.5);
  for (Index i = 0; i < d; ++i) {
    data.labels[i] = loss == Loss::Logistic ? (coin(rng) ? 1.0 : -1.0) : static_cast<double>(counts(rng));
  }
  return data;
}

inline GlmProblem random_problem(Index d, Index n, Loss loss, std::uint64_t seed, Regularization reg = {}) {
  return GlmProblem(random_dataset(d, n, loss, seed), loss, reg);
}

inline Vector random_point(Index n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  return gaussian_vector(n, rng, scale);
}

inline Matrix random_spd(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = normal(rng);
  }
  return m * m.transpose() + static_cast<double>(n) * Matrix::Identity(n, n);
}

// Forwards to another objective and counts reduced-model evaluations.
class CountingObjective final : public Objective {
 public:
  explicit CountingObjective(const Objective& inner) : inner_(inner) {}
  Index dim() const override { return inner_.dim(); }
  double value(const Vector& x) const override { return inner_.value(x); }
  Vector gradient(const Vector& x) const override { return inner_.gradient(x); }
  Matrix hessian(const Vector& x) const override {
    ++hessians;
    return inner_.hessian(x);
  }
  ReducedModel reduced(const Vector& x, const RestrictionOp& op) const override {
    ++reduced_calls;
    return inner_.reduced(x, op);
  }

  mutable std::atomic<int> reduced_calls{0};
  mutable std::atomic<int> hessians{0};

 private:
  const Objective& inner_;
};

// Gradient with one sign flipped: the mutation the oracle checks must catch.
class SignFlippedGradient final : public Objective {
 public:
  explicit SignFlippedGradient(const Objective& inner) : inner_(inner) {}
  Index dim() const override { return inner_.dim(); }
  double value(const Vector& x) const override { return inner_.value(x); }
  Vector gradient(const Vector& x) const override {
    Vector g = inner_.gradient(x);
    g[0] = -g[0];
    return g;
  }
  Matrix hessian(const Vector& x) const override { return inner_.hessian(x); }

 private:
  const Objective& inner_;
};

}  // namespace amln::testing
