#pragma once

#include <deque>

#include "ovk/kernels.hpp"

namespace ovk {

/// Kernel expansion f = sum_i K(x_i, .) alpha_i with a lazy common decay.
///
/// Stored coefficients are raw values beta_i; the effective coefficient is
/// scale * beta_i. Multiplying every coefficient by a factor is O(1): only
/// `scale` changes. When scale drops below kRenormalizeBelow it is folded
/// back into the stored coefficients.
template <typename Scalar>
class Expansion {
 public:
  using Vector = VectorX<Scalar>;

  static constexpr Scalar kRenormalizeBelow = Scalar(1e-6);

  struct Term {
    Vector point;
    Vector raw;
    /// 1-based position of the example in the stream.
    long index;
  };

  Index size() const { return static_cast<Index>(terms_.size()); }
  bool empty() const { return terms_.empty(); }
  Scalar scale() const { return scale_; }
  const std::deque<Term>& terms() const { return terms_; }

  const Vector& point(Index i) const { return terms_[static_cast<std::size_t>(i)].point; }
  long index(Index i) const { return terms_[static_cast<std::size_t>(i)].index; }
  Vector coefficient(Index i) const { return scale_ * terms_[static_cast<std::size_t>(i)].raw; }

  /// Number of times the scale was folded into the stored coefficients.
  long renormalizations() const { return renormalizations_; }

  /// Append a term with the given effective coefficient.
  void push_back(Vector point, const Vector& coefficient, long index) {
    terms_.push_back(Term{std::move(point), coefficient / scale_, index});
  }

  void pop_front() { terms_.pop_front(); }

  /// Multiply every effective coefficient by `factor` (> 0).
  void decay(Scalar factor) {
    scale_ *= factor;
    if (scale_ < kRenormalizeBelow) renormalize();
  }

  void renormalize() {
    for (auto& term : terms_) term.raw *= scale_;
    scale_ = Scalar(1);
    ++renormalizations_;
  }

 private:
  std::deque<Term> terms_;
  Scalar scale_ = Scalar(1);
  long renormalizations_ = 0;
};

/// f(x) for f given by `expansion` under `kernel`. O(n (p + d)) for both
/// kernel families; the coupling matrix is applied once to the accumulated sum.
template <typename Scalar>
VectorX<Scalar> evaluate_expansion(const KernelSpec<Scalar>& kernel, const Expansion<Scalar>& expansion,
                                   const VectorCRef<Scalar>& x) {
  const Index d = kernel.output_dim();
  VectorX<Scalar> acc = VectorX<Scalar>::Zero(d);
  if (expansion.empty()) return acc;
  check_same_length("query point", expansion.point(0).size(), x.size());
  switch (kernel.family()) {
    case KernelFamily::SeparableGaussian: {
      using std::exp;
      const Scalar inv_mu = Scalar(1) / kernel.mu();
      for (const auto& term : expansion.terms()) acc += exp(-(term.point - x).squaredNorm() * inv_mu) * term.raw;
      return expansion.scale() * (kernel.structure() * acc);
    }
    case KernelFamily::NonSeparablePoly: {
      Scalar ones_part(0);
      for (const auto& term : expansion.terms()) {
        const Scalar ip = term.point.dot(x);
        ones_part += ip * term.raw.sum();
        acc += (ip * ip) * term.raw;
      }
      acc *= Scalar(1) - kernel.mu();
      acc.array() += kernel.mu() * ones_part;
      return expansion.scale() * acc;
    }
  }
  return acc;
}

/// |f|^2 in the RKHS via the reproducing property: sum_i <f(x_i), alpha_i>.
/// Exact, O(n^2 (p + d)).
template <typename Scalar>
Scalar expansion_norm_sq(const KernelSpec<Scalar>& kernel, const Expansion<Scalar>& expansion) {
  Scalar total(0);
  for (Index i = 0; i < expansion.size(); ++i)
    total += evaluate_expansion<Scalar>(kernel, expansion, expansion.point(i)).dot(expansion.coefficient(i));
  return total;
}

}  // namespace ovk
