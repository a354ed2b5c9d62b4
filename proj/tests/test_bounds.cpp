#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ovk/batch.hpp"
#include "ovk/bounds.hpp"

namespace ovk {
namespace {

using oracle::Mat;
using oracle::Vec;

TEST(BoundConstants, LeastSquaresExample) {
  const auto c = compute_constants(1.0, 1.0, 0.1, 5.0, BoundBranch::LeastSquares, false);
  EXPECT_DOUBLE_EQ(c.u, 1.0);
  EXPECT_NEAR(c.alpha, 30.0, 1e-12);
  EXPECT_NEAR(c.beta, 5.0, 1e-12);
}

TEST(BoundConstants, SigmaAdmissibleExample) {
  const auto c = compute_constants(1.0, 1.0, 0.1, 2.0, BoundBranch::SigmaAdmissible, false);
  EXPECT_DOUBLE_EQ(c.u, 0.5);
  EXPECT_GT(c.alpha, 0.0);
  EXPECT_GT(c.beta, 0.0);
}

TEST(BoundConstants, TruncationInflatesAlpha) {
  for (double eta : {0.01, 0.1, 0.19}) {
    const auto plain = compute_constants(1.0, 1.0, eta, 5.0, BoundBranch::LeastSquares, false);
    const auto trunc = compute_constants(1.0, 1.0, eta, 5.0, BoundBranch::LeastSquares, true);
    const double el = eta * 5.0;
    EXPECT_NEAR(trunc.alpha / plain.alpha, (10 * el + 1 / el) / (2 * el + 1 / el), 1e-12);
    EXPECT_GT(trunc.alpha, plain.alpha);
    EXPECT_EQ(trunc.beta, plain.beta);
  }
}

TEST(BoundConstants, ViolatedHypothesesNamed) {
  try {
    compute_constants(1.0, 1.0, 0.1, 1.5, BoundBranch::LeastSquares, false);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda > 2 kappa^2"), std::string::npos);
  }
  EXPECT_THROW(compute_constants(1.0, 1.0, 1.0, 5.0, BoundBranch::LeastSquares, false), ConfigError);
  EXPECT_THROW(compute_constants(0.0, 1.0, 0.1, 5.0, BoundBranch::LeastSquares, false), ConfigError);
  EXPECT_THROW(compute_constants(1.0, 0.0, 0.1, 5.0, BoundBranch::SigmaAdmissible, false), ConfigError);
}

TEST(BoundConstants, PerStepBounds) {
  const auto ls = compute_constants(1.0, 2.0, 0.1, 5.0, BoundBranch::LeastSquares, false);
  EXPECT_DOUBLE_EQ(coefficient_norm_bound(ls, 0.05), 0.2);
  EXPECT_DOUBLE_EQ(hypothesis_norm_bound(ls), 2.0);
  const auto sig = compute_constants(2.0, 1.0, 0.1, 4.0, BoundBranch::SigmaAdmissible, false);
  EXPECT_DOUBLE_EQ(coefficient_norm_bound(sig, 0.05), 0.05);
  EXPECT_DOUBLE_EQ(hypothesis_norm_bound(sig), 0.5);
}

std::vector<StepResult<double>> fake_log(std::initializer_list<double> risks) {
  std::vector<StepResult<double>> out;
  for (double r : risks) out.push_back({Vec::Zero(1), 0.0, r, 0.0});
  return out;
}

TEST(CumulativeBound, ReportArithmetic) {
  const auto consts = compute_constants(1.0, 1.0, 0.1, 5.0, BoundBranch::LeastSquares, false);
  const auto log = fake_log({1.0, 2.0, 3.0, 6.0});
  const auto rep = check_cumulative_bound<double>(log, 0.5, consts, 4);
  EXPECT_DOUBLE_EQ(rep.lhs, 3.0);
  EXPECT_DOUBLE_EQ(rep.alpha_term, 15.0);
  EXPECT_DOUBLE_EQ(rep.beta_term, 1.25);
  EXPECT_DOUBLE_EQ(rep.rhs, 16.75);
  EXPECT_DOUBLE_EQ(rep.slack, 13.75);
}

TEST(CumulativeBound, Errors) {
  const auto consts = compute_constants(1.0, 1.0, 0.1, 5.0, BoundBranch::LeastSquares, false);
  const std::vector<StepResult<double>> empty;
  EXPECT_THROW(check_cumulative_bound<double>(empty, 0.0, consts, 0), ConfigError);
  EXPECT_THROW(check_cumulative_bound<double>(fake_log({1.0, 2.0}), 0.0, consts, 3), ConfigError);
}

TEST(CumulativeBound, SlackLinearInBatchRisk) {
  // rhs carries batch_risk with unit weight, so slack moves one-for-one with it
  const auto consts = compute_constants(1.0, 1.0, 0.1, 5.0, BoundBranch::LeastSquares, false);
  const auto log = fake_log({0.3, 0.1, 0.2});
  const double base = check_cumulative_bound<double>(log, 0.0, consts, 3).slack;
  for (double b : {0.1, 0.5, 2.0}) EXPECT_NEAR(check_cumulative_bound<double>(log, b, consts, 3).slack - base, b, 1e-12);
}

TEST(Hypotheses, SmallLambdaFailsLambdaCheck) {
  const auto k = KernelSpec<double>::separable_gaussian(1.0, 2);
  const Mat xs = Mat::Random(3, 10);
  Mat ys = Mat::Random(2, 10);
  const auto diag = check_hypotheses(k, xs, ys, 0.01, Loss<double>::squared());
  EXPECT_NEAR(diag.kappa_sq, 1.1, 1e-12);
  const auto it = std::find_if(diag.checks.begin(), diag.checks.end(),
                               [](const HypothesisCheck& c) { return c.name == "lambda_gt_2kappa_sq"; });
  ASSERT_NE(it, diag.checks.end());
  EXPECT_FALSE(it->passed);
  EXPECT_NEAR(it->margin, 0.01 - 2.2, 1e-12);
  EXPECT_FALSE(diag.branch.has_value());
  const auto text = format_bound_report<double>(diag, std::nullopt, std::nullopt);
  EXPECT_NE(text.find("guaranteed = false"), std::string::npos);
  EXPECT_NE(text.find("kappa_source = empirical_max_over_training_inputs"), std::string::npos);
}

TEST(Hypotheses, MarginAndUnitTargets) {
  const auto k = KernelSpec<double>::separable_gaussian(1.0, 2);
  const Mat xs = Mat::Random(3, 10);
  Mat ys = Mat::Random(2, 10);
  ys.col(0) = (Vec(2) << 0.6, 0.8).finished();
  for (Index i = 1; i < 10; ++i) ys.col(i) /= 2.0 * std::max(1.0, ys.col(i).norm());
  const auto diag = check_hypotheses(k, xs, ys, 2.2 + 0.1, Loss<double>::squared());
  EXPECT_NEAR(diag.c_y, 1.0, 1e-15);
  const auto it = std::find_if(diag.checks.begin(), diag.checks.end(),
                               [](const HypothesisCheck& c) { return c.name == "lambda_gt_2kappa_sq"; });
  EXPECT_TRUE(it->passed);
  EXPECT_NEAR(it->margin, 0.1, 1e-12);
  ASSERT_TRUE(diag.branch.has_value());
  EXPECT_EQ(*diag.branch, BoundBranch::LeastSquares);
}

TEST(Hypotheses, EpsilonLossIsSigmaAdmissible) {
  const auto k = KernelSpec<double>::non_separable_poly(0.5, 2);
  const auto diag = check_hypotheses(k, Mat::Random(3, 5), Mat::Random(2, 5), 0.01, Loss<double>::epsilon_insensitive(0.1));
  ASSERT_TRUE(diag.branch.has_value());
  EXPECT_EQ(*diag.branch, BoundBranch::SigmaAdmissible);
}

// A run satisfying the least-squares hypotheses must respect the cumulative
// bound, and every step the per-step coefficient bound.
void run_and_check(bool truncated, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index m = 200, d = 2;
  Mat xs(3, m), ys(d, m);
  for (Index i = 0; i < m; ++i) {
    xs.col(i) = oracle::uniform_vec(rng, 3, 0.0, 1.0);
    Vec y = oracle::normal_vec(rng, d);
    ys.col(i) = y / std::max(1.0, y.norm());
  }
  const auto k = KernelSpec<double>::separable_gaussian(1.0, d);
  const double lambda = 2.5, eta0 = 0.3;
  const auto diag = check_hypotheses(k, xs, ys, lambda, Loss<double>::squared());
  ASSERT_EQ(diag.branch, BoundBranch::LeastSquares);
  const auto consts = compute_constants(std::sqrt(diag.kappa_sq), diag.c_y, eta0, lambda, BoundBranch::LeastSquares, truncated);
  LearnerParams<double> params{lambda, eta0, {}};
  if (truncated) params.truncation = Truncation{20, 0.25};
  ExpansionModel<double> model(k, params);
  std::vector<StepResult<double>> log;
  for (Index i = 0; i < m; ++i) {
    log.push_back(model.step(xs.col(i), ys.col(i), Loss<double>::squared()));
    ASSERT_LE(log.back().new_coeff_norm, coefficient_norm_bound(consts, learning_rate(params, i + 1)) + 1e-12);
  }
  const double batch_risk = regularized_risk(fit(k, xs, ys, lambda), xs, ys);
  const auto rep = check_cumulative_bound<double>(log, batch_risk, consts, m);
  EXPECT_GE(rep.slack, -1e-9);
  const auto text = format_bound_report<double>(diag, consts, rep);
  EXPECT_NE(text.find("bound_holds = true"), std::string::npos);
}

TEST(CumulativeBound, HoldsOnHypothesisPassingRuns) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    run_and_check(false, seed);
    run_and_check(true, seed);
  }
}

}  // namespace
}  // namespace ovk
