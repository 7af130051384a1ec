#include "amlnewton/problem.hpp"

#include <cmath>
#include <string>

#include "amlnewton/error.hpp"

namespace amln {

namespace {

// log(1 + e^t) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

std::string_view order_name(EvalOrder order) {
  switch (order) {
    case EvalOrder::Value: return "value";
    case EvalOrder::Gradient: return "gradient";
    case EvalOrder::Hessian: return "hessian";
  }
  return "?";
}

[[noreturn]] void overflow(EvalOrder order, Index sample) {
  throw Error(Errc::NumericalOverflow,
              "non-finite " + std::string(order_name(order)) + " term at sample " + std::to_string(sample),
              static_cast<std::int64_t>(sample));
}

void require_length(const Vector& x, Index n) {
  if (x.size() != n) {
    throw Error(Errc::DimensionMismatch,
                "expected vector of length " + std::to_string(n) + ", got " + std::to_string(x.size()));
  }
}

// Lower-triangle rank update B^T B, mirrored so the result is exactly symmetric.
Matrix gram(const Matrix& b) {
  Matrix h = Matrix::Zero(b.cols(), b.cols());
  h.selfadjointView<Eigen::Lower>().rankUpdate(b.transpose());
  h.triangularView<Eigen::StrictlyUpper>() = h.transpose();
  return h;
}

}  // namespace

std::string_view to_string(Loss loss) noexcept {
  return loss == Loss::Logistic ? "logistic" : "poisson";
}

Loss parse_loss(std::string_view text) {
  if (text == "logistic") return Loss::Logistic;
  if (text == "poisson") return Loss::Poisson;
  throw Error(Errc::InvalidArgument, "unknown loss '" + std::string(text) + "'");
}

void validate_dataset(const Dataset& data, Loss loss) {
  if (data.samples() < 1 || data.dims() < 1) {
    throw Error(Errc::InvalidArgument, "dataset needs at least one sample and one feature");
  }
  if (data.labels.size() != data.samples()) {
    throw Error(Errc::DimensionMismatch, "label count does not match sample count");
  }
  if (!data.features.allFinite()) throw Error(Errc::InvalidArgument, "features contain non-finite values");
  for (Index i = 0; i < data.samples(); ++i) {
    const double b = data.labels[i];
    const bool ok = loss == Loss::Logistic
                        ? (b == 1.0 || b == -1.0)
                        : (std::isfinite(b) && b >= 0.0 && std::abs(b - std::round(b)) <= 1e-9);
    if (!ok) {
      throw Error(Errc::LabelDomainError,
                  "label " + std::to_string(b) + " at sample " + std::to_string(i) + " invalid for " +
                      std::string(to_string(loss)) + " loss",
                  static_cast<std::int64_t>(i));
    }
  }
}

ReducedModel Objective::reduced(const Vector& x, const RestrictionOp& op) const {
  if (op.input_dim() != dim()) {
    throw Error(Errc::DimensionMismatch, "operator input dimension " + std::to_string(op.input_dim()) +
                                             " does not match problem dimension " + std::to_string(dim()));
  }
  return {op.restrict(gradient(x)), op.galerkin(hessian(x))};
}

GlmProblem::GlmProblem(Dataset data, Loss loss, Regularization reg)
    : data_(std::move(data)), loss_(loss), reg_(reg) {
  validate_dataset(data_, loss_);
  if (!(reg_.l1 >= 0.0) || !(reg_.l2 >= 0.0) || !(reg_.c > 0.0)) {
    throw Error(Errc::InvalidArgument, "regularization needs l1 >= 0, l2 >= 0, c > 0");
  }
  if (loss_ == Loss::Logistic) {
    positive_ = (data_.labels.array() == 1.0).cast<double>();
  } else {
    positive_ = data_.labels;
  }
}

Vector GlmProblem::margins(const Vector& x, EvalOrder order) const {
  require_length(x, dim());
  Vector t = data_.features * x;
  for (Index i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) overflow(order, i);
  }
  return t;
}

// dF/dt_i: sigmoid(t_i) - 1{b_i = 1} or e^{t_i} - b_i.
Vector GlmProblem::residuals(const Vector& t, EvalOrder order) const {
  Vector r(t.size());
  for (Index i = 0; i < t.size(); ++i) {
    if (loss_ == Loss::Logistic) {
      r[i] = sigmoid(t[i]) - positive_[i];
    } else {
      const double e = std::exp(t[i]);
      if (!std::isfinite(e)) overflow(order, i);
      r[i] = e - positive_[i];
    }
  }
  return r;
}

Vector GlmProblem::curvature(const Vector& t) const {
  Vector w(t.size());
  for (Index i = 0; i < t.size(); ++i) {
    if (loss_ == Loss::Logistic) {
      w[i] = sigmoid(t[i]) * sigmoid(-t[i]);
    } else {
      w[i] = std::exp(t[i]);
      if (!std::isfinite(w[i])) overflow(EvalOrder::Hessian, i);
    }
  }
  return w;
}

double GlmProblem::value(const Vector& x) const {
  const Vector t = margins(x, EvalOrder::Value);
  double loss = 0.0;
  for (Index i = 0; i < t.size(); ++i) {
    const double term = loss_ == Loss::Logistic ? softplus(t[i]) - positive_[i] * t[i]
                                                : std::exp(t[i]) - positive_[i] * t[i];
    if (!std::isfinite(term)) overflow(EvalOrder::Value, i);
    loss += term;
  }
  const double c = reg_.c;
  double smooth_l1 = 0.0;
  for (Index j = 0; j < x.size(); ++j) smooth_l1 += std::hypot(c, x[j]) - c;
  const double total = loss + 0.5 * reg_.l2 * x.squaredNorm() + reg_.l1 * smooth_l1;
  if (!std::isfinite(total)) overflow(EvalOrder::Value, -1);
  return total;
}

Vector GlmProblem::gradient(const Vector& x) const {
  return gradient_from_margins(x, margins(x, EvalOrder::Gradient));
}

Vector GlmProblem::gradient_from_margins(const Vector& x, const Vector& t) const {
  Vector g = data_.features.transpose() * residuals(t, EvalOrder::Gradient);
  const double c = reg_.c;
  for (Index j = 0; j < x.size(); ++j) g[j] += reg_.l2 * x[j] + reg_.l1 * x[j] / std::hypot(c, x[j]);
  return g;
}

void GlmProblem::add_regularizer_diagonal(const Vector& x, Matrix& h) const {
  const double c2 = reg_.c * reg_.c;
  for (Index j = 0; j < x.size(); ++j) {
    const double s = c2 + x[j] * x[j];
    h(j, j) += reg_.l2 + reg_.l1 * c2 / (s * std::sqrt(s));
  }
}

Matrix GlmProblem::hessian(const Vector& x) const {
  const Vector t = margins(x, EvalOrder::Hessian);
  const Vector w = curvature(t);
  Matrix h = gram(w.array().sqrt().matrix().asDiagonal() * data_.features);
  add_regularizer_diagonal(x, h);
  return h;
}

ReducedModel GlmProblem::reduced(const Vector& x, const RestrictionOp& op) const {
  if (op.input_dim() != dim()) {
    throw Error(Errc::DimensionMismatch, "operator input dimension " + std::to_string(op.input_dim()) +
                                             " does not match problem dimension " + std::to_string(dim()));
  }
  if (op.kind() != RestrictionOp::Kind::RowSampling || op.is_full_space()) {
    return Objective::reduced(x, op);
  }
  const Vector t = margins(x, EvalOrder::Hessian);
  const Vector w = curvature(t);
  const Vector g = gradient_from_margins(x, t);

  const auto cols = op.indices();
  const std::vector<Index> subset(cols.begin(), cols.end());
  Matrix h = gram(w.array().sqrt().matrix().asDiagonal() * data_.features(Eigen::all, subset));
  const Vector xs = x(subset);
  add_regularizer_diagonal(xs, h);
  return {g(subset), std::move(h)};
}

QuadraticObjective::QuadraticObjective(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size()) {
    throw Error(Errc::DimensionMismatch, "quadratic objective needs square A matching b");
  }
  a_ = 0.5 * (a_ + a_.transpose());
}

double QuadraticObjective::value(const Vector& x) const {
  require_length(x, dim());
  return 0.5 * x.dot(a_ * x) - b_.dot(x);
}

Vector QuadraticObjective::gradient(const Vector& x) const {
  require_length(x, dim());
  return a_ * x - b_;
}

Matrix QuadraticObjective::hessian(const Vector& x) const {
  require_length(x, dim());
  return a_;
}

}  // namespace amln
