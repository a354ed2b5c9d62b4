#include "ovk/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace ovk {
namespace {

void write_kernel(std::ostream& out, const KernelSpec<double>& k) {
  out << "kernel " << to_string(k.family()) << " " << k.mu() << " " << k.output_dim() << "\n";
  if (k.family() == KernelFamily::SeparableGaussian) {
    out << "structure";
    for (Index i = 0; i < k.output_dim(); ++i)
      for (Index j = 0; j < k.output_dim(); ++j) out << " " << k.structure()(i, j);
    out << "\n";
  }
}

void write_vector(std::ostream& out, const char* key, const Eigen::VectorXd& v) {
  out << key;
  for (Index i = 0; i < v.size(); ++i) out << " " << v[i];
  out << "\n";
}

void write_truncation(std::ostream& out, const std::optional<Truncation>& tr) {
  if (tr)
    out << "truncation " << tr->t0 << " " << tr->epsilon << "\n";
  else
    out << "truncation none\n";
}

void write_terms(std::ostream& out, const Expansion<double>& e, Index d) {
  const Index p = e.empty() ? 0 : e.point(0).size();
  out << "terms " << e.size() << " " << p << " " << d << "\n";
  for (Index i = 0; i < e.size(); ++i) {
    out << e.index(i);
    const Eigen::VectorXd& x = e.point(i);
    for (Index f = 0; f < p; ++f) out << " " << x[f];
    const Eigen::VectorXd a = e.coefficient(i);
    for (Index k = 0; k < d; ++k) out << " " << a[k];
    out << "\n";
  }
  out << "end\n";
}

void write_header(std::ostream& out, const char* model) {
  out << std::setprecision(17);
  out << "ovk-checkpoint " << kCheckpointVersion << "\n";
  out << "model " << model << "\n";
}

/// Line reader that tracks line numbers for error messages.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next non-blank line; the caller consumes its tokens.
  void next() {
    std::string raw;
    do {
      if (!std::getline(in_, raw)) fail("unexpected end of file");
      ++line_no_;
    } while (raw.find_first_not_of(" \t\r") == std::string::npos);
    tokens_.clear();
    tokens_.str(raw);
  }

  /// Next line, which must start with `key`.
  void expect(const std::string& key) {
    next();
    const std::string got = word("key");
    if (got != key) fail("expected '" + key + "', got '" + got + "'");
  }

  std::string word(const char* what) {
    std::string token;
    if (!(tokens_ >> token)) fail(std::string("missing ") + what);
    return token;
  }

  double real(const char* what) {
    const std::string token = word(what);
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(token, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != token.size() || pos == 0) fail(std::string("bad ") + what + " '" + token + "'");
    return v;
  }

  long integer(const char* what) {
    const std::string token = word(what);
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(token, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != token.size() || pos == 0) fail(std::string("bad ") + what + " '" + token + "'");
    return v;
  }

  bool at_end_of_line() {
    std::string rest;
    return !(tokens_ >> rest);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("checkpoint line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::istream& in_;
  std::istringstream tokens_;
  long line_no_ = 0;
};

KernelSpec<double> read_kernel(Reader& r) {
  r.expect("kernel");
  const std::string family = r.word("kernel family");
  const double mu = r.real("mu");
  const long d = r.integer("output dimension");
  if (d < 1) r.fail("output dimension must be >= 1");
  try {
    if (family == "poly") return KernelSpec<double>::non_separable_poly(mu, d);
    if (family != "gaussian") r.fail("unknown kernel family '" + family + "'");
    r.expect("structure");
    Eigen::MatrixXd j(d, d);
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b < d; ++b) j(a, b) = r.real("structure entry");
    return KernelSpec<double>::separable_gaussian(mu, j);
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
}

std::vector<KernelSpec<double>> read_kernels(Reader& r) {
  r.expect("kernels");
  const long m = r.integer("kernel count");
  if (m < 1) r.fail("kernel count must be >= 1");
  std::vector<KernelSpec<double>> out;
  for (long j = 0; j < m; ++j) out.push_back(read_kernel(r));
  return out;
}

Eigen::VectorXd read_vector(Reader& r, const char* key, Index m) {
  r.expect(key);
  Eigen::VectorXd v(m);
  for (Index i = 0; i < m; ++i) v[i] = r.real(key);
  return v;
}

std::optional<Truncation> read_truncation(Reader& r) {
  r.expect("truncation");
  const std::string first = r.word("truncation");
  if (first == "none") return std::nullopt;
  Truncation tr;
  try {
    tr.t0 = std::stol(first);
  } catch (const std::exception&) {
    r.fail("bad truncation t0 '" + first + "'");
  }
  tr.epsilon = r.real("truncation epsilon");
  return tr;
}

Expansion<double> read_terms(Reader& r, Index d_expected) {
  r.expect("terms");
  const long n = r.integer("term count");
  const long p = r.integer("input dimension");
  const long d = r.integer("output dimension");
  if (n < 0 || p < 0) r.fail("negative term count or dimension");
  if (d != d_expected) r.fail("output dimension " + std::to_string(d) + " does not match the kernel");
  Expansion<double> e;
  for (long i = 0; i < n; ++i) {
    r.next();
    const long index = r.integer("term index");
    Eigen::VectorXd x(p);
    Eigen::VectorXd a(d);
    for (Index f = 0; f < p; ++f) x[f] = r.real("input value");
    for (Index k = 0; k < d; ++k) a[k] = r.real("coefficient value");
    if (!r.at_end_of_line()) r.fail("trailing values on term line");
    e.push_back(std::move(x), a, index);
  }
  r.expect("end");
  return e;
}

double read_scalar(Reader& r, const char* key) {
  r.expect(key);
  return r.real(key);
}

}  // namespace

void save_checkpoint(std::ostream& out, const ExpansionModel<double>& model) {
  write_header(out, "onorma");
  out << "lambda " << model.params().lambda << "\n";
  out << "eta0 " << model.params().eta0 << "\n";
  write_truncation(out, model.params().truncation);
  out << "step " << model.step_count() << "\n";
  out << "kernels 1\n";
  write_kernel(out, model.kernel());
  write_terms(out, model.expansion(), model.kernel().output_dim());
}

void save_checkpoint(std::ostream& out, const MultiKernelModel<double>& model) {
  write_header(out, "monorma");
  out << "lambda " << model.params().learner.lambda << "\n";
  out << "eta0 " << model.params().learner.eta0 << "\n";
  write_truncation(out, model.params().learner.truncation);
  out << "r " << model.params().r << "\n";
  out << "step " << model.step_count() << "\n";
  out << "kernels " << model.size() << "\n";
  for (const auto& k : model.kernels()) write_kernel(out, k);
  write_vector(out, "delta", model.delta());
  write_vector(out, "gamma", model.gamma());
  write_terms(out, model.expansion(), model.output_dim());
}

void save_checkpoint(std::ostream& out, const BatchModel<double>& model) {
  write_header(out, "batch");
  out << "lambda " << model.lambda << "\n";
  out << "kernels 1\n";
  write_kernel(out, model.kernel);
  write_terms(out, model.expansion, model.kernel.output_dim());
}

AnyModel load_checkpoint(std::istream& in) {
  Reader r(in);
  r.expect("ovk-checkpoint");
  const long version = r.integer("version");
  if (version != kCheckpointVersion) r.fail("unsupported checkpoint version " + std::to_string(version));
  r.expect("model");
  const std::string kind = r.word("model kind");
  try {
    if (kind == "onorma") {
      LearnerParams<double> params;
      params.lambda = read_scalar(r, "lambda");
      params.eta0 = read_scalar(r, "eta0");
      params.truncation = read_truncation(r);
      r.expect("step");
      const long step = r.integer("step");
      auto kernels = read_kernels(r);
      if (kernels.size() != 1) r.fail("onorma checkpoint must hold exactly one kernel");
      auto terms = read_terms(r, kernels.front().output_dim());
      return ExpansionModel<double>::restore(kernels.front(), params, std::move(terms), step);
    }
    if (kind == "monorma") {
      MultiParams<double> params;
      params.learner.lambda = read_scalar(r, "lambda");
      params.learner.eta0 = read_scalar(r, "eta0");
      params.learner.truncation = read_truncation(r);
      params.r = read_scalar(r, "r");
      r.expect("step");
      const long step = r.integer("step");
      auto kernels = read_kernels(r);
      const auto m = static_cast<Index>(kernels.size());
      Eigen::VectorXd delta = read_vector(r, "delta", m);
      Eigen::VectorXd gamma = read_vector(r, "gamma", m);
      auto terms = read_terms(r, kernels.front().output_dim());
      return MultiKernelModel<double>::restore(std::move(kernels), params, std::move(terms), step, std::move(gamma),
                                               std::move(delta));
    }
    if (kind == "batch") {
      const double lambda = read_scalar(r, "lambda");
      auto kernels = read_kernels(r);
      if (kernels.size() != 1) r.fail("batch checkpoint must hold exactly one kernel");
      auto terms = read_terms(r, kernels.front().output_dim());
      return BatchModel<double>{kernels.front(), std::move(terms), lambda, 0.0};
    }
  } catch (const ConfigError& e) {
    r.fail(e.what());
  } catch (const DimensionError& e) {
    r.fail(e.what());
  }
  r.fail("unknown model kind '" + kind + "'");
}

void save_checkpoint_file(const std::string& path, const AnyModel& model) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint '" + path + "'");
  std::visit([&](const auto& m) { save_checkpoint(out, m); }, model);
  if (!out) throw ConfigError("write failed for checkpoint '" + path + "'");
}

AnyModel load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint '" + path + "'");
  return load_checkpoint(in);
}

Eigen::VectorXd predict_any(const AnyModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::visit([&](const auto& m) -> Eigen::VectorXd { return m.predict(x); }, model);
}

}  // namespace ovk
