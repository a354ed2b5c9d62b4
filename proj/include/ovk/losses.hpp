#pragma once

#include <optional>
#include <string>

#include "ovk/types.hpp"

namespace ovk {

enum class LossKind { Squared, EpsilonInsensitive };

/// Loss l(z, y) on the output space, differentiable in z.
template <typename Scalar>
class Loss {
 public:
  using Vector = VectorX<Scalar>;

  /// 1/2 |z - y|^2
  static Loss squared() { return Loss(LossKind::Squared, Scalar(0)); }

  /// max(0, |z - y| - epsilon). Convex and 1-Lipschitz in z.
  static Loss epsilon_insensitive(Scalar epsilon) {
    if (!(epsilon >= Scalar(0))) throw ConfigError("epsilon-insensitive loss: epsilon must be >= 0");
    return Loss(LossKind::EpsilonInsensitive, epsilon);
  }

  LossKind kind() const { return kind_; }
  Scalar epsilon() const { return epsilon_; }

  /// Global Lipschitz constant in z, when one exists.
  std::optional<Scalar> lipschitz() const {
    if (kind_ == LossKind::EpsilonInsensitive) return Scalar(1);
    return std::nullopt;
  }

  std::string name() const {
    return kind_ == LossKind::Squared ? "squared" : "epsilon:" + std::to_string(static_cast<double>(epsilon_));
  }

 private:
  Loss(LossKind kind, Scalar epsilon) : kind_(kind), epsilon_(epsilon) {}

  LossKind kind_;
  Scalar epsilon_;
};

template <typename Scalar>
Scalar loss_value(const Loss<Scalar>& loss, const VectorCRef<Scalar>& z, const VectorCRef<Scalar>& y) {
  check_same_length("loss arguments", y.size(), z.size());
  switch (loss.kind()) {
    case LossKind::Squared:
      return Scalar(0.5) * (z - y).squaredNorm();
    case LossKind::EpsilonInsensitive:
      return std::max(Scalar(0), (z - y).norm() - loss.epsilon());
  }
  return Scalar(0);
}

/// Gradient in z. At the kink |z - y| = epsilon (and inside the tube) the
/// subgradient 0 is returned.
template <typename Scalar>
VectorX<Scalar> loss_gradient(const Loss<Scalar>& loss, const VectorCRef<Scalar>& z, const VectorCRef<Scalar>& y) {
  check_same_length("loss arguments", y.size(), z.size());
  switch (loss.kind()) {
    case LossKind::Squared:
      return z - y;
    case LossKind::EpsilonInsensitive: {
      const Scalar r = (z - y).norm();
      if (r <= loss.epsilon()) return VectorX<Scalar>::Zero(z.size());
      return (z - y) / r;
    }
  }
  return VectorX<Scalar>();
}

/// One-hot target for class `class_index` among `d` classes.
template <typename Scalar = double>
VectorX<Scalar> encode_label(Index class_index, Index d) {
  if (class_index < 0 || class_index >= d)
    throw ConfigError("encode_label: class " + std::to_string(class_index) + " outside [0, " + std::to_string(d) + ")");
  VectorX<Scalar> out = VectorX<Scalar>::Zero(d);
  out[class_index] = Scalar(1);
  return out;
}

/// Argmax; ties go to the lowest index.
template <typename Derived>
Index decode_label(const Eigen::MatrixBase<Derived>& z) {
  if (z.size() == 0) throw DimensionError("decode_label", 1, 0);
  Index best = 0;
  for (Index i = 1; i < z.size(); ++i)
    if (z(i) > z(best)) best = i;
  return best;
}

}  // namespace ovk
