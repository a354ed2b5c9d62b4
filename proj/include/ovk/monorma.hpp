#pragma once

#include <cmath>
#include <vector>

#include "ovk/onorma.hpp"

namespace ovk {

/// gamma_t = decay^2 gamma_{t-1} + <K(x,x) a, a> + 2 decay <g_{t-1}(x), a>,
/// the squared norm of decay * g_{t-1} + K(x, .) a. Rounding can push the
/// value slightly below zero; it is clamped and `clamped` (if given) is
/// incremented.
template <typename Scalar>
Scalar gamma_update(Scalar gamma_prev, const VectorCRef<Scalar>& g_prev_at_x, const MatrixX<Scalar>& k_xx,
                    const VectorCRef<Scalar>& alpha_new, Scalar decay, long* clamped = nullptr) {
  check_same_length("gamma_update: g(x)", alpha_new.size(), g_prev_at_x.size());
  check_same_length("gamma_update: K(x,x)", alpha_new.size(), k_xx.rows());
  const Scalar value =
      detail::norm_sq_after_step<Scalar>(gamma_prev, g_prev_at_x, alpha_new.dot(k_xx * alpha_new), alpha_new, decay);
  if (value < Scalar(0)) {
    if (clamped) ++*clamped;
    return Scalar(0);
  }
  return value;
}

/// Closed-form kernel weights on the D_r boundary:
///   w_j = delta_j^2 gamma_j,
///   delta_j <- w_j^(1/(r+1)) / (sum_k w_k^(r/(r+1)))^(1/r),
/// so that sum_j delta_j^r = 1. When every w_j <= 1e-300 the previous
/// weights are returned unchanged. A single kernel always gets weight 1.
template <typename Scalar>
VectorX<Scalar> delta_update(const VectorCRef<Scalar>& delta_prev, const VectorCRef<Scalar>& gamma, Scalar r) {
  using std::pow;
  check_same_length("delta_update", delta_prev.size(), gamma.size());
  if (!(r > Scalar(0))) throw ConfigError("delta_update: r must be > 0");
  const Index m = delta_prev.size();
  if (m == 1) return VectorX<Scalar>::Ones(1);
  const VectorX<Scalar> w = delta_prev.array().square() * gamma.array().max(Scalar(0));
  if ((w.array() <= Scalar(1e-300)).all()) return delta_prev;
  // Factor out the largest weight so the powers stay in range; the closed
  // form is homogeneous of degree 0 in w.
  const Scalar w_max = w.maxCoeff();
  const VectorX<Scalar> u = w / w_max;
  Scalar denom(0);
  for (Index j = 0; j < m; ++j) denom += pow(u[j], r / (r + Scalar(1)));
  denom = pow(denom, Scalar(1) / r);
  VectorX<Scalar> out(m);
  for (Index j = 0; j < m; ++j) out[j] = pow(u[j], Scalar(1) / (r + Scalar(1))) / denom;
  return out;
}

/// Uniform weights on the D_r boundary: m^(-1/r) each.
template <typename Scalar>
VectorX<Scalar> uniform_delta(Index m, Scalar r) {
  using std::pow;
  return VectorX<Scalar>::Constant(m, pow(Scalar(m), Scalar(-1) / r));
}

template <typename Scalar>
struct MultiParams {
  LearnerParams<Scalar> learner;
  Scalar r = Scalar(2);
};

template <typename Scalar>
struct MultiPrediction {
  /// sum_j delta_j g_j(x)
  VectorX<Scalar> combined;
  /// g_j(x) per kernel
  std::vector<VectorX<Scalar>> components;
};

/// Multiple-kernel online learner (MONORMA): one shared coefficient
/// sequence, m expansions g_j differing only by kernel, combined with
/// weights delta.
template <typename Scalar>
class MultiKernelModel {
 public:
  using Vector = VectorX<Scalar>;

  MultiKernelModel(std::vector<KernelSpec<Scalar>> kernels, MultiParams<Scalar> params)
      : kernels_(std::move(kernels)), params_(params) {
    if (kernels_.empty()) throw ConfigError("monorma: at least one kernel required");
    for (const auto& k : kernels_)
      if (k.output_dim() != kernels_.front().output_dim())
        throw ConfigError("monorma: all kernels must share the output dimension");
    validate(params_.learner);
    if (!(params_.r > Scalar(0))) throw ConfigError("monorma: r must be > 0");
    gamma_ = Vector::Zero(size());
    delta_ = uniform_delta<Scalar>(size(), params_.r);
  }

  static MultiKernelModel restore(std::vector<KernelSpec<Scalar>> kernels, MultiParams<Scalar> params,
                                  Expansion<Scalar> expansion, long step, Vector gamma, Vector delta) {
    MultiKernelModel model(std::move(kernels), params);
    check_same_length("monorma restore: gamma", model.size(), gamma.size());
    check_same_length("monorma restore: delta", model.size(), delta.size());
    model.expansion_ = std::move(expansion);
    model.step_ = step;
    model.gamma_ = std::move(gamma);
    model.delta_ = std::move(delta);
    return model;
  }

  Index size() const { return static_cast<Index>(kernels_.size()); }
  Index output_dim() const { return kernels_.front().output_dim(); }
  const std::vector<KernelSpec<Scalar>>& kernels() const { return kernels_; }
  const MultiParams<Scalar>& params() const { return params_; }
  const Expansion<Scalar>& expansion() const { return expansion_; }
  long step_count() const { return step_; }
  /// gamma_j = |g_j|^2 in the j-th RKHS.
  const Vector& gamma() const { return gamma_; }
  const Vector& delta() const { return delta_; }
  /// g_j(x_t) from the most recent step.
  const std::vector<Vector>& cached_components() const { return cached_; }
  long gamma_clamps() const { return clamps_; }

  MultiPrediction<Scalar> predict_components(const VectorCRef<Scalar>& x) const {
    MultiPrediction<Scalar> out;
    out.combined = Vector::Zero(output_dim());
    out.components.reserve(kernels_.size());
    for (Index j = 0; j < size(); ++j) {
      out.components.push_back(evaluate_expansion<Scalar>(kernels_[static_cast<std::size_t>(j)], expansion_, x));
      out.combined += delta_[j] * out.components.back();
    }
    return out;
  }

  Vector predict(const VectorCRef<Scalar>& x) const { return predict_components(x).combined; }

  /// Squared norm of f = sum_j delta_j g_j as an expansion under the
  /// combined kernel sum_j delta_j K_j, i.e. sum_j delta_j gamma_j.
  Scalar combined_norm_sq() const { return delta_.dot(gamma_); }

  StepResult<Scalar> step(const VectorCRef<Scalar>& x, const VectorCRef<Scalar>& y, const Loss<Scalar>& loss) {
    check_same_length("target", output_dim(), y.size());
    const long t = step_ + 1;
    const Scalar eta = learning_rate(params_.learner, t);
    const Scalar lambda = params_.learner.lambda;
    detail::check_rate(static_cast<double>(eta * lambda), t);

    MultiPrediction<Scalar> pred = predict_components(x);
    StepResult<Scalar> result;
    result.prediction = pred.combined;
    result.loss = loss_value<Scalar>(loss, result.prediction, y);
    result.instantaneous_risk = result.loss + Scalar(0.5) * lambda * combined_norm_sq();

    // alpha update, using the previous weights
    const Vector grad = loss_gradient<Scalar>(loss, result.prediction, y);
    detail::check_finite_gradient(grad, t);
    const Vector alpha = -eta * grad;
    const Scalar decay = Scalar(1) - eta * lambda;
    result.new_coeff_norm = alpha.norm();

    for (Index j = 0; j < size(); ++j) {
      const auto& k = kernels_[static_cast<std::size_t>(j)];
      const Scalar g = detail::norm_sq_after_step<Scalar>(gamma_[j], pred.components[static_cast<std::size_t>(j)],
                                                           diagonal_quadratic_form<Scalar>(k, x, alpha), alpha, decay);
      if (g < Scalar(0)) ++clamps_;
      gamma_[j] = std::max(Scalar(0), g);
    }
    expansion_.decay(decay);
    if (result.new_coeff_norm > Scalar(0)) expansion_.push_back(Vector(x), alpha, t);
    step_ = t;
    truncate();

    delta_ = delta_update<Scalar>(delta_, gamma_, params_.r);
    cached_ = std::move(pred.components);
    return result;
  }

 private:
  void truncate() {
    if (!params_.learner.truncation) return;
    const auto& tr = *params_.learner.truncation;
    const long window = truncation_window(step_, tr.t0, tr.epsilon);
    bool dropped = false;
    while (!expansion_.empty() && expansion_.index(0) <= step_ - window) {
      const Vector a = expansion_.coefficient(0);
      const Vector& xo = expansion_.point(0);
      for (Index j = 0; j < size(); ++j) {
        const auto& k = kernels_[static_cast<std::size_t>(j)];
        gamma_[j] += diagonal_quadratic_form<Scalar>(k, xo, a) -
                     Scalar(2) * evaluate_expansion<Scalar>(k, expansion_, xo).dot(a);
      }
      expansion_.pop_front();
      dropped = true;
    }
    if (!dropped) return;
    const bool refresh = ++truncations_ % detail::kNormRefreshInterval == 0;
    for (Index j = 0; j < size(); ++j) {
      if (refresh) gamma_[j] = expansion_norm_sq(kernels_[static_cast<std::size_t>(j)], expansion_);
      if (gamma_[j] < Scalar(0)) {
        ++clamps_;
        gamma_[j] = Scalar(0);
      }
    }
  }

  std::vector<KernelSpec<Scalar>> kernels_;
  MultiParams<Scalar> params_;
  Expansion<Scalar> expansion_;
  long step_ = 0;
  Vector gamma_;
  Vector delta_;
  std::vector<Vector> cached_;
  long clamps_ = 0;
  long truncations_ = 0;
};

template <typename Scalar>
MultiPrediction<Scalar> predict_multi(const MultiKernelModel<Scalar>& model, const VectorCRef<Scalar>& x) {
  return model.predict_components(x);
}

template <typename Scalar>
StepResult<Scalar> step_multi(MultiKernelModel<Scalar>& model, const VectorCRef<Scalar>& x, const VectorCRef<Scalar>& y,
                              const Loss<Scalar>& loss) {
  return model.step(x, y, loss);
}

}  // namespace ovk
