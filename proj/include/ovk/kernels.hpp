#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "ovk/types.hpp"

namespace ovk {

enum class KernelFamily {
  /// exp(-|x - x'|^2 / mu) * J
  SeparableGaussian,
  /// mu <x,x'> 1 + (1 - mu) <x,x'>^2 I, with 1 the all-ones matrix
  NonSeparablePoly,
};

inline std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SeparableGaussian:
      return "gaussian";
    case KernelFamily::NonSeparablePoly:
      return "poly";
  }
  return "unknown";
}

/// Output-coupling matrix used by the separable Gaussian kernel when none is
/// given: ones on the diagonal, 1/10 elsewhere.
template <typename Scalar>
MatrixX<Scalar> default_structure(Index d) {
  MatrixX<Scalar> J = MatrixX<Scalar>::Constant(d, d, Scalar(0.1));
  J.diagonal().setOnes();
  return J;
}

/// An operator-valued kernel K : X x X -> L(R^d). Immutable once built.
template <typename Scalar>
class KernelSpec {
 public:
  using Vector = VectorX<Scalar>;
  using Matrix = MatrixX<Scalar>;

  static KernelSpec separable_gaussian(Scalar mu, Index output_dim) {
    return separable_gaussian(mu, default_structure<Scalar>(output_dim));
  }

  /// Throws ConfigError unless mu > 0 and J is square, symmetric and PSD
  /// (smallest eigenvalue >= -1e-9).
  static KernelSpec separable_gaussian(Scalar mu, Matrix structure) {
    using std::abs;
    if (!(mu > Scalar(0)) || !std::isfinite(static_cast<double>(mu)))
      throw ConfigError("gaussian kernel: mu must be > 0, got " + std::to_string(static_cast<double>(mu)));
    if (structure.rows() != structure.cols() || structure.rows() < 1)
      throw ConfigError("gaussian kernel: structure matrix must be square and non-empty, got " +
                        std::to_string(structure.rows()) + "x" + std::to_string(structure.cols()));
    if (!structure.allFinite()) throw ConfigError("gaussian kernel: structure matrix has non-finite entries");
    const Scalar asym = (structure - structure.transpose()).cwiseAbs().maxCoeff();
    const Scalar mag = std::max(Scalar(1), structure.cwiseAbs().maxCoeff());
    if (asym > Scalar(1e-12) * mag)
      throw ConfigError("gaussian kernel: structure matrix is not symmetric (max asymmetry " +
                        std::to_string(static_cast<double>(asym)) + ")");
    Matrix sym = Scalar(0.5) * (structure + structure.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    const Scalar lo = eig.eigenvalues().minCoeff();
    if (lo < Scalar(-1e-9))
      throw ConfigError("gaussian kernel: structure matrix is not positive semi-definite (min eigenvalue " +
                        std::to_string(static_cast<double>(lo)) + ")");
    const Scalar norm = std::max(abs(lo), abs(eig.eigenvalues().maxCoeff()));
    const Index d = sym.rows();
    return KernelSpec(KernelFamily::SeparableGaussian, mu, d, std::move(sym), norm);
  }

  /// Throws ConfigError unless 0 <= mu <= 1 and d >= 1.
  static KernelSpec non_separable_poly(Scalar mu, Index output_dim) {
    if (!(mu >= Scalar(0) && mu <= Scalar(1)))
      throw ConfigError("poly kernel: mu must lie in [0, 1], got " + std::to_string(static_cast<double>(mu)));
    if (output_dim < 1) throw ConfigError("poly kernel: output dimension must be >= 1");
    return KernelSpec(KernelFamily::NonSeparablePoly, mu, output_dim, Matrix(), Scalar(0));
  }

  KernelFamily family() const { return family_; }
  Scalar mu() const { return mu_; }
  Index output_dim() const { return output_dim_; }
  /// J for the separable family; empty otherwise.
  const Matrix& structure() const { return structure_; }
  /// Spectral norm of J (separable family only).
  Scalar structure_norm() const { return structure_norm_; }

  /// Same family and structure, different mu. Used by parameter sweeps.
  KernelSpec with_mu(Scalar mu) const {
    return family_ == KernelFamily::SeparableGaussian ? separable_gaussian(mu, structure_)
                                                      : non_separable_poly(mu, output_dim_);
  }

 private:
  KernelSpec(KernelFamily family, Scalar mu, Index d, Matrix structure, Scalar structure_norm)
      : family_(family), mu_(mu), output_dim_(d), structure_(std::move(structure)), structure_norm_(structure_norm) {}

  KernelFamily family_;
  Scalar mu_;
  Index output_dim_;
  Matrix structure_;
  Scalar structure_norm_;
};

namespace detail {

template <typename Scalar>
void check_inputs(const VectorCRef<Scalar>& x, const VectorCRef<Scalar>& x2) {
  check_same_length("kernel input", x.size(), x2.size());
}

template <typename Scalar>
Scalar gaussian_weight(Scalar mu, const VectorCRef<Scalar>& x, const VectorCRef<Scalar>& x2) {
  using std::exp;
  return exp(-(x - x2).squaredNorm() / mu);
}

}  // namespace detail

/// K(x, x2) as an explicit d x d matrix.
template <typename Scalar>
MatrixX<Scalar> evaluate(const KernelSpec<Scalar>& spec, const VectorCRef<Scalar>& x, const VectorCRef<Scalar>& x2) {
  detail::check_inputs<Scalar>(x, x2);
  const Index d = spec.output_dim();
  switch (spec.family()) {
    case KernelFamily::SeparableGaussian:
      return detail::gaussian_weight<Scalar>(spec.mu(), x, x2) * spec.structure();
    case KernelFamily::NonSeparablePoly: {
      const Scalar ip = x.dot(x2);
      MatrixX<Scalar> k = MatrixX<Scalar>::Constant(d, d, spec.mu() * ip);
      k.diagonal().array() += (Scalar(1) - spec.mu()) * ip * ip;
      return k;
    }
  }
  return MatrixX<Scalar>();
}

/// K(x, x2) * a without forming the matrix.
template <typename Scalar>
VectorX<Scalar> apply(const KernelSpec<Scalar>& spec, const VectorCRef<Scalar>& x, const VectorCRef<Scalar>& x2,
                      const VectorCRef<Scalar>& a) {
  detail::check_inputs<Scalar>(x, x2);
  check_same_length("kernel coefficient", spec.output_dim(), a.size());
  switch (spec.family()) {
    case KernelFamily::SeparableGaussian:
      return detail::gaussian_weight<Scalar>(spec.mu(), x, x2) * (spec.structure() * a);
    case KernelFamily::NonSeparablePoly: {
      const Scalar ip = x.dot(x2);
      VectorX<Scalar> out = ((Scalar(1) - spec.mu()) * ip * ip) * a;
      out.array() += spec.mu() * ip * a.sum();
      return out;
    }
  }
  return VectorX<Scalar>();
}

/// <K(x, x) a, a>
template <typename Scalar>
Scalar diagonal_quadratic_form(const KernelSpec<Scalar>& spec, const VectorCRef<Scalar>& x,
                               const VectorCRef<Scalar>& a) {
  check_same_length("kernel coefficient", spec.output_dim(), a.size());
  switch (spec.family()) {
    case KernelFamily::SeparableGaussian:
      return a.dot(spec.structure() * a);
    case KernelFamily::NonSeparablePoly: {
      const Scalar s = x.squaredNorm();
      const Scalar sum = a.sum();
      return spec.mu() * s * sum * sum + (Scalar(1) - spec.mu()) * s * s * a.squaredNorm();
    }
  }
  return Scalar(0);
}

/// Spectral norm of K(x, x). Closed form per family: |J| for the separable
/// kernel, mu*s*d + (1-mu)*s^2 with s = |x|^2 for the polynomial one.
template <typename Scalar>
Scalar diagonal_operator_norm(const KernelSpec<Scalar>& spec, const VectorCRef<Scalar>& x) {
  switch (spec.family()) {
    case KernelFamily::SeparableGaussian:
      return spec.structure_norm();
    case KernelFamily::NonSeparablePoly: {
      const Scalar s = x.squaredNorm();
      return spec.mu() * s * Scalar(spec.output_dim()) + (Scalar(1) - spec.mu()) * s * s;
    }
  }
  return Scalar(0);
}

/// kappa^2 estimate: max over the columns of `points` of |K(x, x)|_op.
/// This is the empirical supremum over the given inputs, a lower bound of
/// the supremum over the whole input space.
template <typename Derived>
typename Derived::Scalar operator_norm_bound(const KernelSpec<typename Derived::Scalar>& spec,
                                             const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  if (points.cols() == 0) throw ConfigError("operator_norm_bound: empty dataset");
  Scalar best(0);
  for (Index i = 0; i < points.cols(); ++i) {
    const VectorX<Scalar> x = points.col(i);
    best = std::max(best, diagonal_operator_norm<Scalar>(spec, x));
  }
  return best;
}

}  // namespace ovk
