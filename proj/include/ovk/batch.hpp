#pragma once

#include <cmath>
#include <string>

#include "ovk/expansion.hpp"
#include "ovk/losses.hpp"

namespace ovk {

/// Block Gram matrix: the (td x td) matrix whose (i, j) block is K(x_i, x_j),
/// for points stored as columns.
template <typename Derived>
MatrixX<typename Derived::Scalar> block_gram(const KernelSpec<typename Derived::Scalar>& kernel,
                                             const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Index t = points.cols();
  const Index d = kernel.output_dim();
  MatrixX<Scalar> gram(t * d, t * d);
  for (Index j = 0; j < t; ++j) {
    const VectorX<Scalar> xj = points.col(j);
    for (Index i = j; i < t; ++i) {
      const VectorX<Scalar> xi = points.col(i);
      gram.block(i * d, j * d, d, d) = evaluate<Scalar>(kernel, xi, xj);
      if (i != j) gram.block(j * d, i * d, d, d) = gram.block(i * d, j * d, d, d).transpose();
    }
  }
  return gram;
}

/// Regularized least-squares solution over the full block system.
template <typename Scalar>
struct BatchModel {
  KernelSpec<Scalar> kernel;
  Expansion<Scalar> expansion;
  Scalar lambda;
  /// Reciprocal condition estimate of the factored system.
  Scalar rcond;

  VectorX<Scalar> predict(const VectorCRef<Scalar>& x) const { return evaluate_expansion<Scalar>(kernel, expansion, x); }
};

/// Minimizes (1/t) sum_i 1/2 |h(x_i) - y_i|^2 + (lambda/2) |h|^2 over the
/// RKHS. Writing h = sum_j K(x_j, .) a_j, stationarity gives
/// (G + lambda t I) a = Y, solved by Cholesky (with a jitter retry).
/// Points and targets are stored one example per column.
template <typename DerivedX, typename DerivedY>
BatchModel<typename DerivedX::Scalar> fit(const KernelSpec<typename DerivedX::Scalar>& kernel,
                                          const Eigen::MatrixBase<DerivedX>& xs, const Eigen::MatrixBase<DerivedY>& ys,
                                          typename DerivedX::Scalar lambda) {
  using Scalar = typename DerivedX::Scalar;
  const Index t = xs.cols();
  const Index d = kernel.output_dim();
  if (t < 1) throw ConfigError("batch fit: at least one example required");
  if (!(lambda > Scalar(0))) throw ConfigError("batch fit: lambda must be > 0");
  check_same_length("batch fit: number of targets", t, ys.cols());
  check_same_length("batch fit: target dimension", d, ys.rows());

  MatrixX<Scalar> system = block_gram(kernel, xs);
  system.diagonal().array() += lambda * Scalar(t);
  const MatrixX<Scalar> ys_dense = ys;
  const VectorX<Scalar> rhs = ys_dense.reshaped();

  Eigen::LLT<MatrixX<Scalar>> llt(system);
  if (llt.info() != Eigen::Success) {
    const Scalar jitter = Scalar(1e-10) * system.trace() / Scalar(t * d);
    system.diagonal().array() += jitter;
    llt.compute(system);
  }
  const Scalar rcond = llt.info() == Eigen::Success ? llt.rcond() : Scalar(0);
  if (llt.info() != Eigen::Success || !(rcond >= Scalar(1e-14)))
    throw NumericError("batch fit: system is singular or ill-conditioned (condition estimate " +
                       std::to_string(rcond > Scalar(0) ? 1.0 / static_cast<double>(rcond) : INFINITY) + ")");
  const MatrixX<Scalar> coeffs = llt.solve(rhs).reshaped(d, t);

  BatchModel<Scalar> model{kernel, Expansion<Scalar>(), lambda, rcond};
  for (Index i = 0; i < t; ++i) model.expansion.push_back(xs.col(i), coeffs.col(i), static_cast<long>(i + 1));
  return model;
}

/// (1/t) sum_i 1/2 |f(x_i) - y_i|^2 + (lambda/2) |f|^2 for any expansion f.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar regularized_risk(const KernelSpec<typename DerivedX::Scalar>& kernel,
                                           const Expansion<typename DerivedX::Scalar>& f,
                                           typename DerivedX::Scalar lambda, const Eigen::MatrixBase<DerivedX>& xs,
                                           const Eigen::MatrixBase<DerivedY>& ys) {
  using Scalar = typename DerivedX::Scalar;
  const Index t = xs.cols();
  if (t < 1) throw ConfigError("regularized_risk: empty sample");
  check_same_length("regularized_risk: number of targets", t, ys.cols());
  Scalar data_term(0);
  for (Index i = 0; i < t; ++i) {
    const VectorX<Scalar> x = xs.col(i);
    data_term += Scalar(0.5) * (evaluate_expansion<Scalar>(kernel, f, x) - ys.col(i)).squaredNorm();
  }
  const Scalar norm_sq = std::max(Scalar(0), expansion_norm_sq(kernel, f));
  return data_term / Scalar(t) + Scalar(0.5) * lambda * norm_sq;
}

template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar regularized_risk(const BatchModel<Scalar>& model, const Eigen::MatrixBase<DerivedX>& xs,
                        const Eigen::MatrixBase<DerivedY>& ys) {
  return regularized_risk(model.kernel, model.expansion, model.lambda, xs, ys);
}

}  // namespace ovk
