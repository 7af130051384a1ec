#pragma once

#include <string_view>

#include "amlnewton/restriction.hpp"
#include "amlnewton/types.hpp"

namespace amln {

enum class Loss { Logistic, Poisson };

std::string_view to_string(Loss loss) noexcept;
Loss parse_loss(std::string_view text);

enum class EvalOrder { Value = 0, Gradient = 1, Hessian = 2 };

/// d samples (rows) by n dimensions (columns). Labels are stored as reals:
/// {-1, +1} for logistic, nonnegative integers for Poisson.
struct Dataset {
  Matrix features;
  Vector labels;

  Index samples() const noexcept { return features.rows(); }
  Index dims() const noexcept { return features.cols(); }
};

/// Throws InvalidArgument for shape/finiteness problems and LabelDomainError
/// when a label is outside the domain of `loss`.
void validate_dataset(const Dataset& data, Loss loss);

struct ReducedModel {
  Vector gradient;  // R grad F(x)
  Matrix hessian;   // R hess F(x) R^T
};

/// Twice-differentiable objective with exact first and second order oracles.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Matrix hessian(const Vector& x) const = 0;

  /// Reduced gradient and Galerkin Hessian. The default forms the full
  /// Hessian and applies the operator.
  virtual ReducedModel reduced(const Vector& x, const RestrictionOp& op) const;
};

struct Regularization {
  double l1 = 0.0;   // weight of the smoothed l1 term
  double l2 = 0.0;   // ridge weight
  double c = 1e-2;   // smoothing constant of sum_i (sqrt(c^2 + x_i^2) - c)
};

/// F(x) = f(x) + (l2/2)||x||^2 + l1 * sum_i (sqrt(c^2 + x_i^2) - c), with f the
/// logistic loss sum_i [log(1 + e^{t_i}) - 1{b_i = 1} t_i] or the Poisson loss
/// sum_i [e^{t_i} - b_i t_i], t = A x.
///
/// All oracles are const and touch only immutable data, so a problem can be
/// shared across threads.
class GlmProblem final : public Objective {
 public:
  GlmProblem(Dataset data, Loss loss, Regularization reg = {});

  const Dataset& data() const noexcept { return data_; }
  Loss loss() const noexcept { return loss_; }
  const Regularization& regularization() const noexcept { return reg_; }

  Index dim() const override { return data_.dims(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;

  /// Row-sampling operators use the fast path (A_S)^T D (A_S) without forming
  /// the n x n Hessian; sketches go through the full Hessian.
  ReducedModel reduced(const Vector& x, const RestrictionOp& op) const override;

 private:
  Vector margins(const Vector& x, EvalOrder order) const;
  Vector residuals(const Vector& t, EvalOrder order) const;
  Vector curvature(const Vector& t) const;
  Vector gradient_from_margins(const Vector& x, const Vector& t) const;
  void add_regularizer_diagonal(const Vector& x, Matrix& h) const;

  Dataset data_;
  Loss loss_;
  Regularization reg_;
  Vector positive_;  // 1{b_i = 1} for logistic, b_i for Poisson
};

/// F(x) = 1/2 x^T A x - b^T x. Used for exactness checks and tests.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Matrix a, Vector b);

  Index dim() const override { return b_.size(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;

 private:
  Matrix a_;
  Vector b_;
};

}  // namespace amln
