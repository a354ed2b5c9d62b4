#pragma once

// Reference implementations used only by tests. They follow the textbook
// form of each computation (explicit matrices, explicit per-step decay) and
// share no code path with the fused routines they check.

#include <cmath>
#include <random>
#include <vector>

#include "ovk/kernels.hpp"
#include "ovk/losses.hpp"
#include "ovk/onorma.hpp"

namespace ovk::oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Largest |eigenvalue| of a symmetric matrix by power iteration on M,
/// finished with a Rayleigh quotient.
inline double power_iteration_norm(const Mat& m, int iterations = 5000) {
  Vec v = Vec::Ones(m.rows()) + Vec::LinSpaced(m.rows(), 0.0, 0.37);
  v.normalize();
  for (int k = 0; k < iterations; ++k) {
    Vec w = m * v;
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
  }
  return std::abs(v.dot(m * v));
}

inline double eigen_norm(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

/// Block Gram matrix assembled entry by entry from explicit kernel matrices.
inline Mat gram(const KernelSpec<double>& k, const std::vector<Vec>& points) {
  const Index d = k.output_dim();
  const Index t = static_cast<Index>(points.size());
  Mat g(t * d, t * d);
  for (Index i = 0; i < t; ++i)
    for (Index j = 0; j < t; ++j)
      g.block(i * d, j * d, d, d) = evaluate<double>(k, points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
  return g;
}

inline Vec stack(const std::vector<Vec>& coeffs) {
  if (coeffs.empty()) return Vec();
  const Index d = coeffs.front().size();
  Vec out(d * static_cast<Index>(coeffs.size()));
  for (std::size_t i = 0; i < coeffs.size(); ++i) out.segment(static_cast<Index>(i) * d, d) = coeffs[i];
  return out;
}

/// sum_{i,k} <K(x_i, x_k) a_k, a_i>
inline double gram_norm_sq(const KernelSpec<double>& k, const std::vector<Vec>& points, const std::vector<Vec>& coeffs) {
  if (points.empty()) return 0.0;
  const Vec a = stack(coeffs);
  return a.dot(gram(k, points) * a);
}

/// sum_i K(x_i, x) a_i with explicit matrices.
inline Vec naive_predict(const KernelSpec<double>& k, const std::vector<Vec>& points, const std::vector<Vec>& coeffs,
                         const Vec& x) {
  Vec out = Vec::Zero(k.output_dim());
  for (std::size_t i = 0; i < points.size(); ++i) out += evaluate<double>(k, points[i], x) * coeffs[i];
  return out;
}

/// ONORMA exactly as written: every old coefficient multiplied at every step,
/// truncated terms set to zero.
class NaiveOnorma {
 public:
  NaiveOnorma(KernelSpec<double> k, LearnerParams<double> params) : k_(std::move(k)), params_(params) {}

  Vec predict(const Vec& x) const { return naive_predict(k_, points_, coeffs_, x); }

  Vec step(const Vec& x, const Vec& y, const Loss<double>& loss) {
    const long t = ++t_;
    const double eta = params_.eta0 / std::sqrt(static_cast<double>(t));
    const Vec z = predict(x);
    const Vec alpha = -eta * loss_gradient<double>(loss, z, y);
    for (auto& a : coeffs_) a *= (1.0 - eta * params_.lambda);
    points_.push_back(x);
    coeffs_.push_back(alpha);
    index_.push_back(t);
    if (params_.truncation) {
      const long s = truncation_window(t, params_.truncation->t0, params_.truncation->epsilon);
      for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (index_[i] <= t - s) coeffs_[i].setZero();
    }
    return z;
  }

  double norm_sq() const { return gram_norm_sq(k_, points_, coeffs_); }
  const std::vector<Vec>& coeffs() const { return coeffs_; }

 private:
  KernelSpec<double> k_;
  LearnerParams<double> params_;
  std::vector<Vec> points_;
  std::vector<Vec> coeffs_;
  std::vector<long> index_;
  long t_ = 0;
};

template <typename Model>
std::vector<Vec> support_points(const Model& m) {
  std::vector<Vec> out;
  for (Index i = 0; i < m.expansion().size(); ++i) out.push_back(m.expansion().point(i));
  return out;
}

template <typename Model>
std::vector<Vec> effective_coeffs(const Model& m) {
  std::vector<Vec> out;
  for (Index i = 0; i < m.expansion().size(); ++i) out.push_back(m.expansion().coefficient(i));
  return out;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

inline double rel_err(const Vec& a, const Vec& b) {
  return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm()));
}

inline Vec uniform_vec(std::mt19937_64& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline Vec normal_vec(std::mt19937_64& rng, Index n, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

/// Random PSD d x d matrix B B^T / d.
inline Mat random_psd(std::mt19937_64& rng, Index d) {
  Mat b(d, d);
  for (Index j = 0; j < d; ++j) b.col(j) = normal_vec(rng, d);
  return b * b.transpose() / static_cast<double>(d);
}

}  // namespace ovk::oracle
