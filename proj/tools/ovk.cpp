// ovk: command-line runner for the online operator-valued kernel learners.
//
//   ovk generate --n 500 --d 4 --seed 1 --out synth.csv
//   ovk train --config exp.cfg --set algorithm=monorma --metrics m.csv
//   ovk sweep --config exp.cfg --param mu --values 0.001,0.01,0.1,1,10,100
//   ovk check-bounds --config bounds.cfg
//   ovk evaluate --checkpoint model.ckpt --data test.csv --inputs 0-19 --outputs 20-23
//
// Exit codes: 0 ok, 2 configuration error, 3 numeric failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ovk/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

ovk::ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  ovk::ConfigEntries entries;
  if (!path.empty()) entries = ovk::read_config_file(path);
  for (const auto& o : overrides) ovk::apply_override(entries, o);
  return ovk::parse_config(entries);
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0) throw ovk::ConfigError("--values: '" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ovk::ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online learning with operator-valued kernels (ONORMA, MONORMA, batch baseline)"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "key = value experiment config");
    sub->add_option("-s,--set", overrides, "override a config key, key=value (repeatable)");
  };

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset as CSV");
  ovk::SynthSpec synth;
  std::string gen_out;
  gen->add_option("--n", synth.n_instances, "number of instances")->capture_default_str();
  gen->add_option("--d", synth.n_outputs, "number of outputs")->capture_default_str();
  gen->add_option("--seed", synth.seed, "generator seed")->capture_default_str();
  gen->add_option("-o,--out", gen_out, "output CSV path")->required();

  auto* train = app.add_subcommand("train", "train onorma | monorma | batch and report metrics");
  add_config(train);
  std::string algorithm, metrics_path, summary_path, checkpoint_path, bounds_path;
  train->add_option("-a,--algorithm", algorithm, "overrides the config algorithm");
  train->add_option("--metrics", metrics_path, "metrics CSV path");
  train->add_option("--summary", summary_path, "summary path (default: stdout)");
  train->add_option("--checkpoint", checkpoint_path, "checkpoint path");
  train->add_option("--bounds", bounds_path, "bound report path");

  auto* sw = app.add_subcommand("sweep", "grid over mu, lambda or eta0");
  add_config(sw);
  std::string param, values_text, sweep_out;
  sw->add_option("-p,--param", param, "mu | lambda | eta0")->required();
  sw->add_option("-v,--values", values_text, "comma-separated values")->required();
  sw->add_option("-o,--out", sweep_out, "table CSV path (default: stdout)");

  auto* cb = app.add_subcommand("check-bounds", "hypothesis checks and cumulative-risk bound for onorma");
  add_config(cb);
  std::string bounds_out;
  cb->add_option("-o,--out", bounds_out, "report path (default: stdout)");

  auto* ev = app.add_subcommand("evaluate", "MSE of a saved model on a CSV file");
  std::string ckpt_in, data_in, inputs, outputs;
  bool header = false;
  ev->add_option("--checkpoint", ckpt_in, "checkpoint file")->required();
  ev->add_option("--data", data_in, "CSV file")->required();
  ev->add_option("--inputs", inputs, "input columns, e.g. 0-19")->required();
  ev->add_option("--outputs", outputs, "output columns")->required();
  ev->add_flag("--header", header, "CSV has a header row");

  auto* defaults = app.add_subcommand("config", "print every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      ovk::write_csv(ovk::gen_synthetic(synth), gen_out);
    } else if (*train) {
      if (!algorithm.empty()) overrides.push_back("algorithm=" + algorithm);
      if (!metrics_path.empty()) overrides.push_back("output.metrics=" + metrics_path);
      if (!checkpoint_path.empty()) overrides.push_back("output.checkpoint=" + checkpoint_path);
      if (!bounds_path.empty()) overrides.push_back("output.bounds=" + bounds_path);
      if (!summary_path.empty()) overrides.push_back("output.summary=" + summary_path);
      const auto cfg = load_config(config_path, overrides);
      const auto result = ovk::run_experiment(cfg);
      if (summary_path.empty() && cfg.summary_path.empty()) std::cout << result.summary.text();
    } else if (*sw) {
      const auto cfg = load_config(config_path, overrides);
      const auto rows = ovk::sweep(cfg, ovk::parse_sweep_parameter(param), parse_values(values_text));
      std::ostringstream os;
      ovk::write_sweep_csv(os, ovk::parse_sweep_parameter(param), rows);
      emit(sweep_out, os.str());
    } else if (*cb) {
      const auto cfg = load_config(config_path, overrides);
      emit(bounds_out, ovk::check_bounds(cfg).text);
    } else if (*ev) {
      const auto model = ovk::load_checkpoint_file(ckpt_in);
      ovk::CsvLayout layout;
      layout.input_cols = ovk::parse_columns(inputs);
      layout.output_cols = ovk::parse_columns(outputs);
      layout.header = header;
      const auto ds = ovk::load_csv(data_in, layout);
      double mse = 0;
      for (ovk::Index j = 0; j < ds.size(); ++j)
        mse += (ovk::predict_any(model, ds.inputs.col(j)) - ds.targets.col(j)).squaredNorm();
      std::cout << "n = " << ds.size() << "\nmse = " << mse / static_cast<double>(ds.size()) << "\n";
    } else if (*defaults) {
      std::cout << ovk::default_config_text();
    }
  } catch (const ovk::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ovk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
