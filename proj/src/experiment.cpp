#include "ovk/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ovk {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != value.size() || !std::isfinite(v))
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  return v;
}

long parse_integer(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != value.size()) throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  return static_cast<long>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "off" || value == "no" || value == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

struct KeyDoc {
  const char* key;
  const char* value;
  const char* doc;
};

// Defaults follow the experimental protocol: eta = 1, eta_t = 1/sqrt(t), lambda = 0.01,
// equal-size train/test halves, synthetic data with 500 instances and d = 4.
constexpr KeyDoc kKeys[] = {
    {"algorithm", "onorma", "onorma | monorma | batch"},
    {"data.source", "synthetic", "synthetic | csv"},
    {"data.n", "500", "synthetic: number of instances"},
    {"data.d", "4", "synthetic: number of outputs"},
    {"data.seed", "1", "synthetic: generator seed"},
    {"data.path", "", "csv: file path"},
    {"data.inputs", "", "csv: input column indices, e.g. 0-8"},
    {"data.outputs", "", "csv: output column indices (one label column for classification)"},
    {"data.header", "false", "csv: first row is a header"},
    {"data.task", "regression", "regression | classification"},
    {"split.train_fraction", "0.5", "fraction of examples used for training"},
    {"split.seed", "1", "shuffle seed"},
    {"split.normalize", "none", "none | zscore | unit_ball (training statistics)"},
    {"kernels", "poly:0.2", "comma list of gaussian:<mu> | poly:<mu>; one kernel unless monorma"},
    {"kernel.structure", "", "optional CSV file holding the d x d output matrix J of Gaussian kernels"},
    {"loss", "squared", "squared | epsilon:<eps>"},
    {"lambda", "0.01", "regularization"},
    {"eta0", "1", "learning rate scale, eta_t = eta0 / sqrt(t)"},
    {"truncation", "off", "on | off"},
    {"truncation.t0", "100", "window start"},
    {"truncation.epsilon", "0.25", "window growth exponent offset, in (0, 1/2)"},
    {"r", "2", "monorma: weight constraint exponent"},
    {"output.metrics", "", "metrics CSV path"},
    {"output.summary", "", "summary text path"},
    {"output.bounds", "", "bound report path"},
    {"output.checkpoint", "", "checkpoint path"},
};

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config key 'kernel.structure': cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_number("kernel.structure", trim(cell)));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("config key 'kernel.structure': '" + path + "' is empty");
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      throw ConfigError("config key 'kernel.structure': ragged matrix in '" + path + "'");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct TestMetrics {
  double mse = 0;
  std::optional<double> misclassification;
};

template <typename Model>
TestMetrics evaluate_on(const Model& model, const Dataset& test) {
  TestMetrics out;
  long wrong = 0;
  for (Index j = 0; j < test.size(); ++j) {
    const Eigen::VectorXd z = model.predict(test.inputs.col(j));
    out.mse += (z - test.targets.col(j)).squaredNorm();
    if (test.task == Task::Classification && decode_label(z) != decode_label(test.targets.col(j))) ++wrong;
  }
  out.mse /= static_cast<double>(std::max<Index>(1, test.size()));
  if (test.task == Task::Classification)
    out.misclassification = static_cast<double>(wrong) / static_cast<double>(std::max<Index>(1, test.size()));
  return out;
}

template <typename Model>
void run_online(Model& model, const Dataset& train, const Loss<double>& loss, ExperimentResult& result) {
  double sum_sq = 0;
  const Index n = train.size();
  result.metrics.reserve(static_cast<std::size_t>(n));
  result.run_log.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const auto start = Clock::now();
    StepResult<double> r = model.step(train.inputs.col(j), train.targets.col(j), loss);
    const double us = std::chrono::duration<double, std::micro>(Clock::now() - start).count();
    sum_sq += (r.prediction - train.targets.col(j)).squaredNorm();
    MetricsRecord rec{j + 1, r.loss, sum_sq / static_cast<double>(j + 1), r.instantaneous_risk, us, {}};
    if constexpr (std::is_same_v<Model, MultiKernelModel<double>>)
      rec.delta.assign(model.delta().data(), model.delta().data() + model.delta().size());
    result.metrics.push_back(std::move(rec));
    result.run_log.push_back(std::move(r));
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::string kernel_list_text(const std::vector<KernelChoice>& ks) {
  std::string out;
  for (const auto& k : ks) out += (out.empty() ? "" : ",") + to_string(k.family) + ":" + fmt(k.mu);
  return out;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Onorma:
      return "onorma";
    case Algorithm::Monorma:
      return "monorma";
    case Algorithm::Batch:
      return "batch";
  }
  return "onorma";
}

KernelChoice parse_kernel_choice(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("config key 'kernels': expected family:mu, got '" + text + "'");
  const std::string family = trim(text.substr(0, colon));
  KernelChoice out;
  if (family == "gaussian")
    out.family = KernelFamily::SeparableGaussian;
  else if (family == "poly")
    out.family = KernelFamily::NonSeparablePoly;
  else
    throw ConfigError("config key 'kernels': unknown kernel family '" + family + "' (gaussian | poly)");
  out.mu = parse_number("kernels", trim(text.substr(colon + 1)));
  // range checks live in the kernel factories
  try {
    if (out.family == KernelFamily::SeparableGaussian)
      KernelSpec<double>::separable_gaussian(out.mu, 1);
    else
      KernelSpec<double>::non_separable_poly(out.mu, 1);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config key 'kernels': ") + e.what());
  }
  return out;
}

std::vector<KernelChoice> parse_kernel_list(const std::string& text) {
  std::vector<KernelChoice> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(parse_kernel_choice(trim(item)));
  if (out.empty()) throw ConfigError("config key 'kernels': no kernel given");
  return out;
}

Loss<double> parse_loss(const std::string& text) {
  if (text == "squared") return Loss<double>::squared();
  if (text.rfind("epsilon:", 0) == 0) {
    try {
      return Loss<double>::epsilon_insensitive(parse_number("loss", text.substr(8)));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config key 'loss': ") + e.what());
    }
  }
  throw ConfigError("config key 'loss': unknown loss '" + text + "' (squared | epsilon:<eps>)");
}

ConfigEntries read_config_text(std::istream& in, const std::string& source) {
  ConfigEntries out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    if (out.count(key)) throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigEntries read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return read_config_text(in, path);
}

void apply_override(ConfigEntries& entries, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("override '" + assignment + "': empty key");
  entries[key] = trim(assignment.substr(eq + 1));
}

std::string default_config_text() {
  std::ostringstream os;
  for (const auto& k : kKeys) os << "# " << k.doc << "\n" << k.key << " = " << k.value << "\n";
  return os.str();
}

ExperimentConfig parse_config(const ConfigEntries& entries) {
  for (const auto& [key, value] : entries) {
    const bool known = std::any_of(std::begin(kKeys), std::end(kKeys), [&](const KeyDoc& k) { return key == k.key; });
    if (!known) throw ConfigError("config key '" + key + "': unknown key");
  }
  auto get = [&](const std::string& key) -> std::string {
    if (auto it = entries.find(key); it != entries.end()) return it->second;
    for (const auto& k : kKeys)
      if (key == k.key) return k.value;
    return "";
  };

  ExperimentConfig cfg;
  const std::string alg = get("algorithm");
  if (alg == "onorma")
    cfg.algorithm = Algorithm::Onorma;
  else if (alg == "monorma")
    cfg.algorithm = Algorithm::Monorma;
  else if (alg == "batch")
    cfg.algorithm = Algorithm::Batch;
  else
    throw ConfigError("config key 'algorithm': unknown algorithm '" + alg + "' (onorma | monorma | batch)");

  cfg.data_source = get("data.source");
  if (cfg.data_source != "synthetic" && cfg.data_source != "csv")
    throw ConfigError("config key 'data.source': expected synthetic or csv, got '" + cfg.data_source + "'");
  cfg.synth.n_instances = parse_integer("data.n", get("data.n"));
  cfg.synth.n_outputs = parse_integer("data.d", get("data.d"));
  cfg.synth.seed = static_cast<std::uint64_t>(parse_integer("data.seed", get("data.seed")));
  if (cfg.synth.n_instances < 2) throw ConfigError("config key 'data.n': must be >= 2");
  if (cfg.synth.n_outputs < 1) throw ConfigError("config key 'data.d': must be >= 1");
  cfg.csv_path = get("data.path");
  cfg.csv_layout.header = parse_bool("data.header", get("data.header"));
  const std::string task = get("data.task");
  if (task == "regression")
    cfg.csv_layout.task = Task::Regression;
  else if (task == "classification")
    cfg.csv_layout.task = Task::Classification;
  else
    throw ConfigError("config key 'data.task': expected regression or classification, got '" + task + "'");
  if (cfg.data_source == "csv") {
    if (cfg.csv_path.empty()) throw ConfigError("config key 'data.path': required for csv data");
    try {
      cfg.csv_layout.input_cols = parse_columns(get("data.inputs"));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config key 'data.inputs': ") + e.what());
    }
    try {
      cfg.csv_layout.output_cols = parse_columns(get("data.outputs"));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config key 'data.outputs': ") + e.what());
    }
  }

  cfg.train_fraction = parse_number("split.train_fraction", get("split.train_fraction"));
  if (!(cfg.train_fraction > 0 && cfg.train_fraction < 1))
    throw ConfigError("config key 'split.train_fraction': must lie in (0, 1)");
  cfg.split_seed = static_cast<std::uint64_t>(parse_integer("split.seed", get("split.seed")));
  try {
    cfg.normalization = parse_normalization(get("split.normalize"));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config key 'split.normalize': ") + e.what());
  }

  cfg.kernels = parse_kernel_list(get("kernels"));
  cfg.structure_path = get("kernel.structure");
  cfg.loss = get("loss");
  parse_loss(cfg.loss);
  cfg.lambda = parse_number("lambda", get("lambda"));
  if (!(cfg.lambda > 0)) throw ConfigError("config key 'lambda': must be > 0");
  cfg.eta0 = parse_number("eta0", get("eta0"));
  if (!(cfg.eta0 > 0)) throw ConfigError("config key 'eta0': must be > 0");
  if (!(cfg.eta0 * cfg.lambda < 1)) throw ConfigError("config key 'eta0': eta0 * lambda must be < 1");
  if (parse_bool("truncation", get("truncation"))) {
    Truncation tr;
    tr.t0 = parse_integer("truncation.t0", get("truncation.t0"));
    tr.epsilon = parse_number("truncation.epsilon", get("truncation.epsilon"));
    if (tr.t0 <= 0) throw ConfigError("config key 'truncation.t0': must be > 0");
    if (!(tr.epsilon > 0 && tr.epsilon < 0.5)) throw ConfigError("config key 'truncation.epsilon': must lie in (0, 1/2)");
    cfg.truncation = tr;
  }
  cfg.r = parse_number("r", get("r"));
  if (!(cfg.r > 0)) throw ConfigError("config key 'r': must be > 0");

  if (cfg.algorithm != Algorithm::Monorma && cfg.kernels.size() != 1)
    throw ConfigError("config key 'kernels': " + to_string(cfg.algorithm) + " takes exactly one kernel, got " +
                      std::to_string(cfg.kernels.size()));
  if (cfg.algorithm == Algorithm::Batch && cfg.loss != "squared")
    throw ConfigError("config key 'loss': batch supports only the squared loss");

  cfg.metrics_path = get("output.metrics");
  cfg.summary_path = get("output.summary");
  cfg.bounds_path = get("output.bounds");
  cfg.checkpoint_path = get("output.checkpoint");
  return cfg;
}

std::vector<KernelSpec<double>> build_kernels(const ExperimentConfig& cfg, Index output_dim) {
  std::optional<Eigen::MatrixXd> structure;
  if (!cfg.structure_path.empty()) {
    structure = read_matrix_csv(cfg.structure_path);
    if (structure->rows() != output_dim || structure->cols() != output_dim)
      throw ConfigError("config key 'kernel.structure': expected a " + std::to_string(output_dim) + "x" +
                        std::to_string(output_dim) + " matrix, got " + std::to_string(structure->rows()) + "x" +
                        std::to_string(structure->cols()));
  }
  std::vector<KernelSpec<double>> out;
  for (const auto& k : cfg.kernels) {
    try {
      if (k.family == KernelFamily::NonSeparablePoly)
        out.push_back(KernelSpec<double>::non_separable_poly(k.mu, output_dim));
      else if (structure)
        out.push_back(KernelSpec<double>::separable_gaussian(k.mu, *structure));
      else
        out.push_back(KernelSpec<double>::separable_gaussian(k.mu, output_dim));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config key 'kernels': ") + e.what());
    }
  }
  return out;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& metrics, Index n_kernels) {
  out << "step,loss,cum_mse,r_inst," << kTimingColumn;
  for (Index j = 0; j < n_kernels; ++j) out << ",delta_" << (j + 1);
  out << "\n";
  out << std::setprecision(17);
  for (const auto& m : metrics) {
    out << m.step << "," << m.loss << "," << m.cum_mse << "," << m.r_inst << "," << std::setprecision(6) << m.step_us
        << std::setprecision(17);
    for (double d : m.delta) out << "," << d;
    out << "\n";
  }
}

void Summary::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_)
    if (e.first == key) {
      e.second = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void Summary::set(const std::string& key, double value) { set(key, fmt(value)); }
void Summary::set(const std::string& key, long value) { set(key, std::to_string(value)); }

std::optional<std::string> Summary::get(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  return std::nullopt;
}

double Summary::number(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ConfigError("summary has no key '" + key + "'");
  return std::stod(*v);
}

std::string Summary::text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

Split load_split(const ExperimentConfig& cfg) {
  Dataset ds = cfg.data_source == "csv" ? load_csv(cfg.csv_path, cfg.csv_layout) : gen_synthetic(cfg.synth);
  validate(ds);
  return split_and_normalize(ds, cfg.train_fraction, cfg.split_seed, cfg.normalization);
}

BoundCheck check_bounds_for_run(const ExperimentConfig& cfg, const Dataset& train,
                                const std::vector<StepResult<double>>& run_log) {
  const auto kernels = build_kernels(cfg, train.output_dim());
  const Loss<double> loss = parse_loss(cfg.loss);
  BoundCheck out;
  out.diagnostics = check_hypotheses(kernels.front(), train.inputs, train.targets, cfg.lambda, loss);
  const auto& diag = out.diagnostics;
  std::string extra;
  if (diag.branch && diag.kappa_sq > 0) {
    const double kappa = std::sqrt(diag.kappa_sq);
    const double c = *diag.branch == BoundBranch::LeastSquares ? diag.c_y : *loss.lipschitz();
    try {
      out.constants = compute_constants(kappa, c, cfg.eta0, cfg.lambda, *diag.branch, cfg.truncation.has_value());
    } catch (const ConfigError& e) {
      extra += std::string("constants_error = ") + e.what() + "\n";
    }
    if (out.constants) {
      double batch_risk = 0.0;
      if (*diag.branch == BoundBranch::LeastSquares) {
        const auto fstar = fit(kernels.front(), train.inputs, train.targets, cfg.lambda);
        batch_risk = regularized_risk(fstar, train.inputs, train.targets);
        extra += "batch_risk_source = batch_minimizer\n";
      } else {
        // the batch solver minimizes the squared loss only; 0 lower-bounds the
        // minimal regularized risk, so the check stays conservative
        extra += "batch_risk_source = lower_bound_zero\n";
      }
      out.report = check_cumulative_bound<double>(run_log, batch_risk, *out.constants, static_cast<long>(run_log.size()));
    }
  }
  out.text = format_bound_report(diag, out.constants, out.report) + extra;
  return out;
}

BoundCheck check_bounds(const ExperimentConfig& cfg) {
  if (cfg.algorithm != Algorithm::Onorma)
    throw ConfigError("config key 'algorithm': check-bounds applies to onorma only");
  const Split split = load_split(cfg);
  const auto kernels = build_kernels(cfg, split.train.output_dim());
  LearnerParams<double> params{cfg.lambda, cfg.eta0, cfg.truncation};
  ExpansionModel<double> model(kernels.front(), params);
  ExperimentResult scratch;
  run_online(model, split.train, parse_loss(cfg.loss), scratch);
  return check_bounds_for_run(cfg, split.train, scratch.run_log);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Split split = load_split(cfg);
  const Dataset& train = split.train;
  const Dataset& test = split.test;
  const auto kernels = build_kernels(cfg, train.output_dim());
  const Loss<double> loss = parse_loss(cfg.loss);

  ExperimentResult result;
  Summary& s = result.summary;
  s.set("algorithm", to_string(cfg.algorithm));
  s.set("dataset", train.name.substr(0, train.name.rfind('/')));
  s.set("n_train", static_cast<long>(train.size()));
  s.set("n_test", static_cast<long>(test.size()));
  s.set("input_dim", static_cast<long>(train.input_dim()));
  s.set("output_dim", static_cast<long>(train.output_dim()));
  s.set("normalization", to_string(cfg.normalization));
  s.set("kernels", kernel_list_text(cfg.kernels));
  s.set("loss", cfg.loss);
  s.set("lambda", cfg.lambda);
  if (cfg.algorithm != Algorithm::Batch) {
    s.set("eta0", cfg.eta0);
    s.set("truncation", cfg.truncation ? "t0=" + std::to_string(cfg.truncation->t0) + ",epsilon=" + fmt(cfg.truncation->epsilon)
                                       : std::string("off"));
  }

  TestMetrics tm;
  const auto start = Clock::now();
  switch (cfg.algorithm) {
    case Algorithm::Onorma: {
      ExpansionModel<double> model(kernels.front(), LearnerParams<double>{cfg.lambda, cfg.eta0, cfg.truncation});
      run_online(model, train, loss, result);
      s.set("train_time_s", seconds_since(start));
      s.set("support_size", static_cast<long>(model.expansion().size()));
      tm = evaluate_on(model, test);
      result.model = std::move(model);
      break;
    }
    case Algorithm::Monorma: {
      MultiKernelModel<double> model(kernels, MultiParams<double>{{cfg.lambda, cfg.eta0, cfg.truncation}, cfg.r});
      run_online(model, train, loss, result);
      s.set("train_time_s", seconds_since(start));
      s.set("r", cfg.r);
      s.set("support_size", static_cast<long>(model.expansion().size()));
      for (Index j = 0; j < model.size(); ++j) s.set("delta_" + std::to_string(j + 1), model.delta()[j]);
      s.set("gamma_clamps", model.gamma_clamps());
      tm = evaluate_on(model, test);
      result.model = std::move(model);
      break;
    }
    case Algorithm::Batch: {
      auto model = fit(kernels.front(), train.inputs, train.targets, cfg.lambda);
      s.set("train_time_s", seconds_since(start));
      s.set("train_mse", evaluate_on(model, train).mse);
      s.set("rcond", model.rcond);
      tm = evaluate_on(model, test);
      result.model = std::move(model);
      break;
    }
  }
  if (!result.metrics.empty()) s.set("final_cum_mse", result.metrics.back().cum_mse);
  s.set("test_mse", tm.mse);
  if (tm.misclassification) s.set("test_misclassification", *tm.misclassification);
  s.set("test_protocol", "model frozen after the training split");

  if (cfg.algorithm == Algorithm::Onorma) {
    const auto diag = check_hypotheses(kernels.front(), train.inputs, train.targets, cfg.lambda, loss);
    s.set("bound.branch", diag.branch ? to_string(*diag.branch) : std::string("none"));
    if (diag.branch || !cfg.bounds_path.empty()) {
      result.bounds = check_bounds_for_run(cfg, train, result.run_log);
      if (result.bounds->report) {
        s.set("bound.lhs", result.bounds->report->lhs);
        s.set("bound.rhs", result.bounds->report->rhs);
        s.set("bound.slack", result.bounds->report->slack);
      }
    }
  }

  if (!cfg.metrics_path.empty()) {
    std::ofstream out(cfg.metrics_path);
    if (!out) throw ConfigError("config key 'output.metrics': cannot write '" + cfg.metrics_path + "'");
    write_metrics_csv(out, result.metrics, cfg.algorithm == Algorithm::Monorma ? static_cast<Index>(kernels.size()) : 0);
  }
  if (!cfg.summary_path.empty()) write_text(cfg.summary_path, s.text());
  if (!cfg.bounds_path.empty() && result.bounds) write_text(cfg.bounds_path, result.bounds->text);
  if (!cfg.checkpoint_path.empty()) save_checkpoint_file(cfg.checkpoint_path, *result.model);
  return result;
}

SweepParameter parse_sweep_parameter(const std::string& text) {
  if (text == "mu") return SweepParameter::Mu;
  if (text == "lambda") return SweepParameter::Lambda;
  if (text == "eta0") return SweepParameter::Eta0;
  throw ConfigError("sweep parameter '" + text + "': expected mu, lambda or eta0");
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Mu:
      return "mu";
    case SweepParameter::Lambda:
      return "lambda";
    case SweepParameter::Eta0:
      return "eta0";
  }
  return "mu";
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepParameter parameter, std::vector<double> values) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  std::sort(values.begin(), values.end());
  std::vector<SweepRow> rows;
  for (double v : values) {
    ExperimentConfig run = cfg;
    run.metrics_path.clear();
    run.summary_path.clear();
    run.bounds_path.clear();
    run.checkpoint_path.clear();
    switch (parameter) {
      case SweepParameter::Mu:
        for (auto& k : run.kernels) k.mu = v;
        break;
      case SweepParameter::Lambda:
        run.lambda = v;
        break;
      case SweepParameter::Eta0:
        run.eta0 = v;
        break;
    }
    if (!(run.lambda > 0) || !(run.eta0 > 0) || !(run.lambda * run.eta0 < 1))
      throw ConfigError("sweep: " + to_string(parameter) + " = " + fmt(v) + " gives an invalid lambda/eta0 pair");
    rows.push_back({v, run_experiment(run).summary});
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, SweepParameter parameter, const std::vector<SweepRow>& rows) {
  out << to_string(parameter) << ",final_cum_mse,test_mse,test_misclassification,train_time_s\n";
  for (const auto& row : rows) {
    auto field = [&](const char* key) { return row.summary.get(key).value_or(""); };
    out << fmt(row.value) << "," << field("final_cum_mse") << "," << field("test_mse") << ","
        << field("test_misclassification") << "," << field("train_time_s") << "\n";
  }
}

}  // namespace ovk
