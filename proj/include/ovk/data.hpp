#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ovk/types.hpp"

namespace ovk {

enum class Task { Regression, Classification };

/// Examples stored one per column: inputs is p x n, targets is d x n.
struct Dataset {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
  std::string name;
  Task task = Task::Regression;

  Index size() const { return inputs.cols(); }
  Index input_dim() const { return inputs.rows(); }
  Index output_dim() const { return targets.rows(); }
};

/// Throws ConfigError unless columns match, dimensions are uniform and every value is finite.
void validate(const Dataset& ds);

/// Seeded random stream: std::mt19937_64 keyed by splitmix64(seed, stream).
/// Uniforms take the top 53 bits of each draw; normals use Box-Muller.
/// Both transforms are written out so that a seed yields the same numbers
/// on every standard library.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal.
  double normal();
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

namespace stream_id {
inline constexpr std::uint64_t kFeatures = 1;
inline constexpr std::uint64_t kWeights = 2;
inline constexpr std::uint64_t kSplit = 3;
}  // namespace stream_id

struct SynthSpec {
  Index n_instances = 500;
  Index n_outputs = 4;
  std::uint64_t seed = 1;
};

inline constexpr Index kSyntheticInputDim = 20;
inline constexpr Index kSyntheticFeatureDim = 7;

/// phi(x) = (x1^2, x4^2, x1 x2, x3 x5, x2, x4, 1), 1-based feature indices.
Eigen::VectorXd synthetic_features(const Eigen::Ref<const Eigen::VectorXd>& x);

/// d x 7 task weights, row i ~ N(0, diag(0.5, 0.25, 0.1, 0.05, 0.15, 0.1, 0.15)).
Eigen::MatrixXd synthetic_weights(std::uint64_t seed, Index d);

/// Inputs iid U[0,1]^20; target i = <w_i, phi(x)>, no noise.
Dataset gen_synthetic(const SynthSpec& spec);

/// Parses "0-8,10" into {0,...,8,10}.
std::vector<Index> parse_columns(const std::string& text);

struct CsvLayout {
  std::vector<Index> input_cols;
  std::vector<Index> output_cols;
  bool header = false;
  /// Classification: a single integer label column expanded to one-hot.
  /// Distinct labels, sorted ascending, map to classes 0..d-1.
  Task task = Task::Regression;
};

Dataset load_csv(const std::string& path, const CsvLayout& layout);

/// Header x0..x{p-1},y0..y{d-1}; values written with 17 significant digits.
void write_csv(const Dataset& ds, const std::string& path);

enum class Normalization {
  None,
  /// per-feature (x - mean) / std with training statistics
  ZScore,
  /// x / max_i |x_i| over the training inputs, so training inputs lie in the unit ball
  UnitBall,
};

Normalization parse_normalization(const std::string& text);
std::string to_string(Normalization mode);

struct NormalizationStats {
  Normalization mode = Normalization::None;
  Eigen::VectorXd shift;
  Eigen::VectorXd scale;
};

Eigen::MatrixXd apply_normalization(const NormalizationStats& stats, const Eigen::MatrixXd& inputs);

struct Split {
  Dataset train;
  Dataset test;
  NormalizationStats stats;
};

/// Seeded Fisher-Yates shuffle, then the first round(fraction * n) examples
/// form the training half. Statistics come from the training half only.
Split split_and_normalize(const Dataset& ds, double train_fraction, std::uint64_t seed, Normalization mode);

}  // namespace ovk
