#include "ovk/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

namespace ovk {

void validate(const Dataset& ds) {
  if (ds.inputs.cols() != ds.targets.cols())
    throw ConfigError("dataset '" + ds.name + "': " + std::to_string(ds.inputs.cols()) + " inputs but " +
                      std::to_string(ds.targets.cols()) + " targets");
  if (!ds.inputs.allFinite() || !ds.targets.allFinite())
    throw ConfigError("dataset '" + ds.name + "': non-finite values");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ stream)) {}

double RandomStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  // rejection keeps the draw unbiased
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

Eigen::VectorXd synthetic_features(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() < 5) throw DimensionError("synthetic_features: input", kSyntheticInputDim, x.size());
  Eigen::VectorXd phi(kSyntheticFeatureDim);
  phi << x[0] * x[0], x[3] * x[3], x[0] * x[1], x[2] * x[4], x[1], x[3], 1.0;
  return phi;
}

Eigen::MatrixXd synthetic_weights(std::uint64_t seed, Index d) {
  static const double kVariance[kSyntheticFeatureDim] = {0.5, 0.25, 0.1, 0.05, 0.15, 0.1, 0.15};
  RandomStream rng(seed, stream_id::kWeights);
  Eigen::MatrixXd w(d, kSyntheticFeatureDim);
  for (Index i = 0; i < d; ++i)
    for (Index k = 0; k < kSyntheticFeatureDim; ++k) w(i, k) = std::sqrt(kVariance[k]) * rng.normal();
  return w;
}

Dataset gen_synthetic(const SynthSpec& spec) {
  if (spec.n_instances < 1) throw ConfigError("synthetic: n_instances must be >= 1");
  if (spec.n_outputs < 1) throw ConfigError("synthetic: n_outputs must be >= 1");
  const Eigen::MatrixXd w = synthetic_weights(spec.seed, spec.n_outputs);
  RandomStream rng(spec.seed, stream_id::kFeatures);
  Dataset ds;
  ds.name = "synthetic";
  ds.inputs.resize(kSyntheticInputDim, spec.n_instances);
  ds.targets.resize(spec.n_outputs, spec.n_instances);
  for (Index j = 0; j < spec.n_instances; ++j) {
    for (Index f = 0; f < kSyntheticInputDim; ++f) ds.inputs(f, j) = rng.uniform();
    ds.targets.col(j) = w * synthetic_features(ds.inputs.col(j));
  }
  return ds;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

Index parse_index(const std::string& s) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("column spec: '" + s + "' is not an integer");
  }
  if (pos != s.size() || v < 0) throw ConfigError("column spec: '" + s + "' is not a non-negative integer");
  return static_cast<Index>(v);
}

}  // namespace

std::vector<Index> parse_columns(const std::string& text) {
  std::vector<Index> out;
  for (const auto& part : split_fields(text)) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_index(part));
      continue;
    }
    const Index lo = parse_index(trim(part.substr(0, dash)));
    const Index hi = parse_index(trim(part.substr(dash + 1)));
    if (hi < lo) throw ConfigError("column spec: empty range '" + part + "'");
    for (Index c = lo; c <= hi; ++c) out.push_back(c);
  }
  if (out.empty()) throw ConfigError("column spec: '" + text + "' selects no columns");
  return out;
}

Dataset load_csv(const std::string& path, const CsvLayout& layout) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  if (layout.input_cols.empty() || layout.output_cols.empty())
    throw ConfigError("csv layout: input and output columns must be non-empty");
  if (layout.task == Task::Classification && layout.output_cols.size() != 1)
    throw ConfigError("csv layout: classification expects exactly one label column");
  for (Index c : layout.input_cols)
    if (std::find(layout.output_cols.begin(), layout.output_cols.end(), c) != layout.output_cols.end())
      throw ConfigError("csv layout: column " + std::to_string(c) + " is both input and output");

  std::vector<std::string> names;
  std::vector<std::vector<double>> xs;
  std::vector<std::vector<double>> ys;
  std::string line;
  long line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (layout.header && names.empty()) {
      names = fields;
      width = fields.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) + " fields, got " +
                       std::to_string(fields.size()));
    auto read = [&](const std::vector<Index>& cols) {
      std::vector<double> row;
      for (Index c : cols) {
        if (static_cast<std::size_t>(c) >= fields.size())
          throw ConfigError(path + ": column " + std::to_string(c) + " out of range (file has " +
                            std::to_string(fields.size()) + " columns)");
        double v;
        if (!parse_double(fields[static_cast<std::size_t>(c)], v) || !std::isfinite(v)) {
          const std::string col = static_cast<std::size_t>(c) < names.size() ? names[static_cast<std::size_t>(c)]
                                                                               : "column " + std::to_string(c);
          throw ParseError(path + ":" + std::to_string(line_no) + ": non-numeric value '" +
                           fields[static_cast<std::size_t>(c)] + "' in " + col);
        }
        row.push_back(v);
      }
      return row;
    };
    xs.push_back(read(layout.input_cols));
    ys.push_back(read(layout.output_cols));
  }
  if (xs.empty()) throw ParseError(path + ": no data rows");

  Dataset ds;
  ds.name = path;
  ds.task = layout.task;
  const Index n = static_cast<Index>(xs.size());
  const Index p = static_cast<Index>(layout.input_cols.size());
  ds.inputs.resize(p, n);
  for (Index j = 0; j < n; ++j)
    for (Index f = 0; f < p; ++f) ds.inputs(f, j) = xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(f)];

  if (layout.task == Task::Classification) {
    std::map<double, Index> classes;
    for (const auto& y : ys) classes.emplace(y[0], 0);
    Index k = 0;
    for (auto& [label, idx] : classes) idx = k++;
    ds.targets = Eigen::MatrixXd::Zero(k, n);
    for (Index j = 0; j < n; ++j) ds.targets(classes.at(ys[static_cast<std::size_t>(j)][0]), j) = 1.0;
  } else {
    const Index d = static_cast<Index>(layout.output_cols.size());
    ds.targets.resize(d, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < d; ++i) ds.targets(i, j) = ys[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << std::setprecision(17);
  for (Index f = 0; f < ds.input_dim(); ++f) out << (f ? "," : "") << "x" << f;
  for (Index i = 0; i < ds.output_dim(); ++i) out << ",y" << i;
  out << "\n";
  for (Index j = 0; j < ds.size(); ++j) {
    for (Index f = 0; f < ds.input_dim(); ++f) out << (f ? "," : "") << ds.inputs(f, j);
    for (Index i = 0; i < ds.output_dim(); ++i) out << "," << ds.targets(i, j);
    out << "\n";
  }
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

Normalization parse_normalization(const std::string& text) {
  if (text == "none" || text == "false" || text == "off") return Normalization::None;
  if (text == "zscore" || text == "true" || text == "on") return Normalization::ZScore;
  if (text == "unit_ball") return Normalization::UnitBall;
  throw ConfigError("unknown normalization '" + text + "' (none | zscore | unit_ball)");
}

std::string to_string(Normalization mode) {
  switch (mode) {
    case Normalization::None:
      return "none";
    case Normalization::ZScore:
      return "zscore";
    case Normalization::UnitBall:
      return "unit_ball";
  }
  return "none";
}

Eigen::MatrixXd apply_normalization(const NormalizationStats& stats, const Eigen::MatrixXd& inputs) {
  if (stats.mode == Normalization::None) return inputs;
  check_same_length("normalization", stats.shift.size(), inputs.rows());
  return (inputs.colwise() - stats.shift).array().colwise() / stats.scale.array();
}

Split split_and_normalize(const Dataset& ds, double train_fraction, std::uint64_t seed, Normalization mode) {
  validate(ds);
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("split: train_fraction must lie in (0, 1)");
  const Index n = ds.size();
  const Index n_train = static_cast<Index>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n)
    throw ConfigError("split: " + std::to_string(n) + " examples with fraction " + std::to_string(train_fraction) +
                      " leaves an empty side");

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  RandomStream rng(seed, stream_id::kSplit);
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  auto take = [&](Index from, Index count, const std::string& suffix) {
    Dataset part;
    part.name = ds.name + suffix;
    part.task = ds.task;
    part.inputs.resize(ds.input_dim(), count);
    part.targets.resize(ds.output_dim(), count);
    for (Index k = 0; k < count; ++k) {
      const Index src = order[static_cast<std::size_t>(from + k)];
      part.inputs.col(k) = ds.inputs.col(src);
      part.targets.col(k) = ds.targets.col(src);
    }
    return part;
  };

  Split out;
  out.train = take(0, n_train, "/train");
  out.test = take(n_train, n - n_train, "/test");
  out.stats.mode = mode;
  const Index p = ds.input_dim();
  switch (mode) {
    case Normalization::None:
      return out;
    case Normalization::ZScore: {
      out.stats.shift = out.train.inputs.rowwise().mean();
      const Eigen::MatrixXd centered = out.train.inputs.colwise() - out.stats.shift;
      out.stats.scale = (centered.array().square().rowwise().sum() / static_cast<double>(n_train)).sqrt();
      for (Index f = 0; f < p; ++f)
        if (!(out.stats.scale[f] > 0.0)) out.stats.scale[f] = 1.0;
      break;
    }
    case Normalization::UnitBall: {
      out.stats.shift = Eigen::VectorXd::Zero(p);
      double radius = out.train.inputs.colwise().norm().maxCoeff();
      if (!(radius > 0.0)) radius = 1.0;
      out.stats.scale = Eigen::VectorXd::Constant(p, radius);
      break;
    }
  }
  out.train.inputs = apply_normalization(out.stats, out.train.inputs);
  out.test.inputs = apply_normalization(out.stats, out.test.inputs);
  return out;
}

}  // namespace ovk
