#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ovk/losses.hpp"

namespace ovk {
namespace {

using oracle::Vec;

const Vec kOrigin = Vec::Zero(2);
const Vec kTarget = (Vec(2) << 3.0, 4.0).finished();

TEST(Losses, Values) {
  const auto sq = Loss<double>::squared();
  EXPECT_EQ(loss_value<double>(sq, kTarget, kTarget), 0.0);
  EXPECT_DOUBLE_EQ(loss_value<double>(sq, kOrigin, kTarget), 12.5);
  EXPECT_DOUBLE_EQ(loss_value<double>(Loss<double>::epsilon_insensitive(1.0), kOrigin, kTarget), 4.0);
  EXPECT_EQ(loss_value<double>(Loss<double>::epsilon_insensitive(10.0), kOrigin, kTarget), 0.0);
}

TEST(Losses, Gradients) {
  const Vec g = loss_gradient<double>(Loss<double>::squared(), kOrigin, kTarget);
  EXPECT_EQ(g, (Vec(2) << -3.0, -4.0).finished());
  EXPECT_TRUE(loss_gradient<double>(Loss<double>::epsilon_insensitive(10.0), kOrigin, kTarget).isZero(0.0));
  // on the kink the zero subgradient is used
  EXPECT_TRUE(loss_gradient<double>(Loss<double>::epsilon_insensitive(5.0), kOrigin, kTarget).isZero(0.0));
  const Vec unit = loss_gradient<double>(Loss<double>::epsilon_insensitive(1.0), kOrigin, kTarget);
  EXPECT_NEAR(unit.norm(), 1.0, 1e-15);
}

TEST(Losses, DimensionMismatch) {
  EXPECT_THROW(loss_value<double>(Loss<double>::squared(), Vec::Zero(2), Vec::Zero(3)), DimensionError);
  EXPECT_THROW(loss_gradient<double>(Loss<double>::squared(), Vec::Zero(3), Vec::Zero(2)), DimensionError);
  EXPECT_THROW(Loss<double>::epsilon_insensitive(-0.5), ConfigError);
}

TEST(Losses, LipschitzMetadata) {
  EXPECT_FALSE(Loss<double>::squared().lipschitz().has_value());
  EXPECT_EQ(*Loss<double>::epsilon_insensitive(0.3).lipschitz(), 1.0);
}

TEST(Losses, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(3);
  const double h = 1e-6;
  for (const auto& loss : {Loss<double>::squared(), Loss<double>::epsilon_insensitive(0.5)}) {
    int checked = 0;
    while (checked < 100) {
      const Index d = 1 + checked % 5;
      const Vec z = oracle::normal_vec(rng, d, 2.0);
      const Vec y = oracle::normal_vec(rng, d, 2.0);
      const Vec v = oracle::normal_vec(rng, d);
      // smooth points only: stay clear of the epsilon kink and of z = y
      if (loss.kind() == LossKind::EpsilonInsensitive && std::abs((z - y).norm() - loss.epsilon()) < 1e-2) continue;
      const double fd = (loss_value<double>(loss, z + h * v, y) - loss_value<double>(loss, z - h * v, y)) / (2 * h);
      const double analytic = loss_gradient<double>(loss, z, y).dot(v);
      EXPECT_LE(std::abs(fd - analytic), 1e-4 * std::max(1.0, std::abs(analytic)));
      ++checked;
    }
  }
}

TEST(Losses, ConvexityProbe) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& loss : {Loss<double>::squared(), Loss<double>::epsilon_insensitive(0.7)}) {
    for (int i = 0; i < 1000; ++i) {
      const Vec z1 = oracle::normal_vec(rng, 3, 2.0);
      const Vec z2 = oracle::normal_vec(rng, 3, 2.0);
      const Vec y = oracle::normal_vec(rng, 3);
      const double t = unit(rng);
      const double lhs = loss_value<double>(loss, t * z1 + (1 - t) * z2, y);
      const double rhs = t * loss_value<double>(loss, z1, y) + (1 - t) * loss_value<double>(loss, z2, y);
      ASSERT_LE(lhs, rhs + 1e-9);
    }
  }
}

TEST(Losses, EpsilonInsensitiveIsOneLipschitz) {
  std::mt19937_64 rng(6);
  const auto loss = Loss<double>::epsilon_insensitive(0.4);
  for (int i = 0; i < 1000; ++i) {
    const Vec z1 = oracle::normal_vec(rng, 4);
    const Vec z2 = oracle::normal_vec(rng, 4);
    const Vec y = oracle::normal_vec(rng, 4);
    ASSERT_LE(std::abs(loss_value<double>(loss, z1, y) - loss_value<double>(loss, z2, y)), (z1 - z2).norm() + 1e-12);
  }
}

TEST(Labels, EncodeDecode) {
  EXPECT_EQ(encode_label(2, 4), (Vec(4) << 0, 0, 1, 0).finished());
  EXPECT_EQ(decode_label((Vec(3) << 0.1, 0.9, 0.3).finished()), 1);
  EXPECT_EQ(decode_label((Vec(3) << 0.5, 0.5, 0.1).finished()), 0);
  for (Index d = 1; d <= 6; ++d)
    for (Index k = 0; k < d; ++k) EXPECT_EQ(decode_label(encode_label(k, d)), k);
  EXPECT_THROW(encode_label(4, 4), ConfigError);
  EXPECT_THROW(encode_label(-1, 4), ConfigError);
}

}  // namespace
}  // namespace ovk
