#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ovk/bounds.hpp"
#include "ovk/checkpoint.hpp"
#include "ovk/data.hpp"

namespace ovk {

enum class Algorithm { Onorma, Monorma, Batch };

std::string to_string(Algorithm a);

struct KernelChoice {
  KernelFamily family = KernelFamily::NonSeparablePoly;
  double mu = 0.2;
};

/// Parses "gaussian:1" or "poly:0.2".
KernelChoice parse_kernel_choice(const std::string& text);
std::vector<KernelChoice> parse_kernel_list(const std::string& text);

/// Parses "squared" or "epsilon:<eps>".
Loss<double> parse_loss(const std::string& text);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::Onorma;

  // data
  std::string data_source = "synthetic";
  SynthSpec synth;
  std::string csv_path;
  CsvLayout csv_layout;
  double train_fraction = 0.5;
  std::uint64_t split_seed = 1;
  Normalization normalization = Normalization::None;

  // model
  std::vector<KernelChoice> kernels = {KernelChoice{}};
  std::string structure_path;
  std::string loss = "squared";
  double lambda = 0.01;
  double eta0 = 1.0;
  std::optional<Truncation> truncation;
  double r = 2.0;

  // outputs
  std::string metrics_path;
  std::string summary_path;
  std::string bounds_path;
  std::string checkpoint_path;
};

/// Flat "key = value" entries; '#' starts a comment.
using ConfigEntries = std::map<std::string, std::string>;

ConfigEntries read_config_text(std::istream& in, const std::string& source);
ConfigEntries read_config_file(const std::string& path);
/// Applies one "key=value" override.
void apply_override(ConfigEntries& entries, const std::string& assignment);

/// Throws ConfigError naming the offending key on unknown keys or bad values.
ExperimentConfig parse_config(const ConfigEntries& entries);

/// Every accepted key with its default, as a config file.
std::string default_config_text();

/// Kernel specs for the configured output dimension (J read from
/// `structure_path` for Gaussian kernels when set).
std::vector<KernelSpec<double>> build_kernels(const ExperimentConfig& cfg, Index output_dim);

struct MetricsRecord {
  long step;
  double loss;
  /// (1/t) sum_{i<=t} |f_{i-1}(x_i) - y_i|^2
  double cum_mse;
  double r_inst;
  double step_us;
  std::vector<double> delta;
};

/// step,loss,cum_mse,r_inst,step_us[,delta_1..delta_m]
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& metrics, Index n_kernels);
inline constexpr const char* kTimingColumn = "step_us";

/// Ordered key/value pairs, written one "key = value" per line.
class Summary {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long value);
  std::optional<std::string> get(const std::string& key) const;
  double number(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string text() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct BoundCheck {
  Diagnostics<double> diagnostics;
  std::optional<BoundConstants<double>> constants;
  std::optional<BoundReport<double>> report;
  std::string text;
};

struct ExperimentResult {
  std::vector<MetricsRecord> metrics;
  std::vector<StepResult<double>> run_log;
  Summary summary;
  std::optional<BoundCheck> bounds;
  std::optional<AnyModel> model;
};

Split load_split(const ExperimentConfig& cfg);

/// Trains on the first half, freezes the model, evaluates on the second.
/// Writes the configured output files.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Runs ONORMA on the training split, fits the batch minimizer on the same
/// sample, and evaluates the cumulative-risk guarantee when the hypotheses hold.
BoundCheck check_bounds(const ExperimentConfig& cfg);

/// Same check on an already-run ONORMA log.
BoundCheck check_bounds_for_run(const ExperimentConfig& cfg, const Dataset& train,
                                const std::vector<StepResult<double>>& run_log);

enum class SweepParameter { Mu, Lambda, Eta0 };
SweepParameter parse_sweep_parameter(const std::string& text);
std::string to_string(SweepParameter p);

struct SweepRow {
  double value;
  Summary summary;
};

/// One run_experiment per value, rows sorted by value. Output files in the
/// config are left untouched.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepParameter parameter, std::vector<double> values);
void write_sweep_csv(std::ostream& out, SweepParameter parameter, const std::vector<SweepRow>& rows);

}  // namespace ovk
