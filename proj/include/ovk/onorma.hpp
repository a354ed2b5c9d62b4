#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "ovk/expansion.hpp"
#include "ovk/losses.hpp"

namespace ovk {

struct Truncation {
  long t0 = 100;
  double epsilon = 0.25;
};

/// s_t = min(t, t0) + 1{t > t0} floor((t - t0)^(1/2 + epsilon)).
inline long truncation_window(long t, long t0, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw ConfigError("truncation: epsilon must lie in (0, 1/2), got " + std::to_string(epsilon));
  if (t0 <= 0) throw ConfigError("truncation: t0 must be > 0, got " + std::to_string(t0));
  if (t < 0) throw ConfigError("truncation: t must be >= 0");
  if (t <= t0) return t;
  const long double v = std::pow(static_cast<long double>(t - t0), 0.5L + static_cast<long double>(epsilon));
  // powers that land on an integer may come back a hair below it
  const long double nearest = std::round(v);
  const long extra = std::fabs(v - nearest) <= 1e-9L * v ? static_cast<long>(nearest) : static_cast<long>(std::floor(v));
  return t0 + extra;
}

template <typename Scalar>
struct LearnerParams {
  Scalar lambda = Scalar(0.01);
  Scalar eta0 = Scalar(1);
  std::optional<Truncation> truncation;
};

template <typename Scalar>
void validate(const LearnerParams<Scalar>& params) {
  if (!(params.lambda > Scalar(0))) throw ConfigError("lambda must be > 0");
  if (!(params.eta0 > Scalar(0))) throw ConfigError("eta0 must be > 0");
  if (params.truncation) truncation_window(0, params.truncation->t0, params.truncation->epsilon);
}

/// eta_t = eta0 / sqrt(t), t >= 1.
template <typename Scalar>
Scalar learning_rate(const LearnerParams<Scalar>& params, long t) {
  using std::sqrt;
  return params.eta0 / sqrt(Scalar(t));
}

template <typename Scalar>
struct StepResult {
  /// f_{t-1}(x_t), emitted before the update.
  VectorX<Scalar> prediction;
  Scalar loss;
  /// loss + (lambda/2) |f_{t-1}|^2
  Scalar instantaneous_risk;
  /// |alpha_{t,t}|
  Scalar new_coeff_norm;
};

namespace detail {

/// decay^2 |g|^2 + <K(x,x) a, a> + 2 decay <g(x), a>: squared norm of
/// decay * g + K(x, .) a.
template <typename Scalar>
Scalar norm_sq_after_step(Scalar norm_sq_prev, const VectorCRef<Scalar>& g_prev_at_x, Scalar k_quad, const VectorCRef<Scalar>& alpha_new,
                          Scalar decay) {
  return decay * decay * norm_sq_prev + k_quad + Scalar(2) * decay * g_prev_at_x.dot(alpha_new);
}

inline void check_rate(double eta_lambda, long t) {
  if (!(eta_lambda < 1.0))
    throw ConfigError("step " + std::to_string(t) + ": eta_t * lambda = " + std::to_string(eta_lambda) + " must be < 1");
}

template <typename Scalar>
void check_finite_gradient(const VectorX<Scalar>& grad, long t) {
  if (!grad.allFinite()) throw NumericError("step " + std::to_string(t) + ": non-finite loss gradient");
}

/// Number of truncation events between full Gram refreshes of the tracked norms.
inline constexpr long kNormRefreshInterval = 256;

}  // namespace detail

/// Single-kernel online learner (ONORMA). State after t steps is f_t.
template <typename Scalar>
class ExpansionModel {
 public:
  using Vector = VectorX<Scalar>;

  ExpansionModel(KernelSpec<Scalar> kernel, LearnerParams<Scalar> params)
      : kernel_(std::move(kernel)), params_(params) {
    validate(params_);
  }

  /// Rebuild a model from saved state; the tracked norm is recomputed exactly.
  static ExpansionModel restore(KernelSpec<Scalar> kernel, LearnerParams<Scalar> params, Expansion<Scalar> expansion,
                                long step) {
    ExpansionModel model(std::move(kernel), params);
    model.expansion_ = std::move(expansion);
    model.step_ = step;
    model.norm_sq_ = std::max(Scalar(0), expansion_norm_sq(model.kernel_, model.expansion_));
    return model;
  }

  const KernelSpec<Scalar>& kernel() const { return kernel_; }
  const LearnerParams<Scalar>& params() const { return params_; }
  const Expansion<Scalar>& expansion() const { return expansion_; }
  long step_count() const { return step_; }

  /// |f_t|^2 maintained incrementally.
  Scalar tracked_norm_sq() const { return norm_sq_; }

  Vector predict(const VectorCRef<Scalar>& x) const { return evaluate_expansion<Scalar>(kernel_, expansion_, x); }

  StepResult<Scalar> step(const VectorCRef<Scalar>& x, const VectorCRef<Scalar>& y, const Loss<Scalar>& loss) {
    check_same_length("target", kernel_.output_dim(), y.size());
    const long t = step_ + 1;
    const Scalar eta = learning_rate(params_, t);
    detail::check_rate(static_cast<double>(eta * params_.lambda), t);

    StepResult<Scalar> result;
    result.prediction = predict(x);
    result.loss = loss_value<Scalar>(loss, result.prediction, y);
    result.instantaneous_risk = result.loss + Scalar(0.5) * params_.lambda * norm_sq_;

    const Vector grad = loss_gradient<Scalar>(loss, result.prediction, y);
    detail::check_finite_gradient(grad, t);
    const Vector alpha = -eta * grad;
    const Scalar decay = Scalar(1) - eta * params_.lambda;
    result.new_coeff_norm = alpha.norm();

    norm_sq_ = std::max(Scalar(0), detail::norm_sq_after_step<Scalar>(norm_sq_, result.prediction,
                                                                       diagonal_quadratic_form<Scalar>(kernel_, x, alpha),
                                                                       alpha, decay));
    expansion_.decay(decay);
    if (result.new_coeff_norm > Scalar(0)) expansion_.push_back(Vector(x), alpha, t);
    step_ = t;
    truncate();
    return result;
  }

 private:
  void truncate() {
    if (!params_.truncation) return;
    const long window = truncation_window(step_, params_.truncation->t0, params_.truncation->epsilon);
    bool dropped = false;
    while (!expansion_.empty() && expansion_.index(0) <= step_ - window) {
      const Vector a = expansion_.coefficient(0);
      const Vector& xo = expansion_.point(0);
      norm_sq_ += diagonal_quadratic_form<Scalar>(kernel_, xo, a) - Scalar(2) * predict(xo).dot(a);
      expansion_.pop_front();
      dropped = true;
    }
    if (!dropped) return;
    if (++truncations_ % detail::kNormRefreshInterval == 0) norm_sq_ = expansion_norm_sq(kernel_, expansion_);
    norm_sq_ = std::max(Scalar(0), norm_sq_);
  }

  KernelSpec<Scalar> kernel_;
  LearnerParams<Scalar> params_;
  Expansion<Scalar> expansion_;
  long step_ = 0;
  Scalar norm_sq_ = Scalar(0);
  long truncations_ = 0;
};

template <typename Scalar>
VectorX<Scalar> predict(const ExpansionModel<Scalar>& model, const VectorCRef<Scalar>& x) {
  return model.predict(x);
}

template <typename Scalar>
StepResult<Scalar> step(ExpansionModel<Scalar>& model, const VectorCRef<Scalar>& x, const VectorCRef<Scalar>& y,
                        const Loss<Scalar>& loss) {
  return model.step(x, y, loss);
}

/// |f_t|^2 from the Gram quadratic form (exact, O(t^2)).
template <typename Scalar>
Scalar hypothesis_norm_sq(const ExpansionModel<Scalar>& model) {
  return expansion_norm_sq(model.kernel(), model.expansion());
}

}  // namespace ovk
