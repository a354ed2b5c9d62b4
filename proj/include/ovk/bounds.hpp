#pragma once

#include <cmath>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ovk/kernels.hpp"
#include "ovk/losses.hpp"
#include "ovk/onorma.hpp"

namespace ovk {

enum class BoundBranch {
  /// convex, C-Lipschitz loss
  SigmaAdmissible,
  /// squared loss, bounded targets, lambda > 2 kappa^2
  LeastSquares,
};

inline std::string to_string(BoundBranch branch) {
  return branch == BoundBranch::SigmaAdmissible ? "sigma_admissible" : "least_squares";
}

/// Constants of the cumulative-risk guarantee
///   (1/m) sum_i R_inst(f_{i-1}, x_i, y_i) <= R_reg(f*_m, m) + alpha/sqrt(m) + beta/m.
template <typename Scalar>
struct BoundConstants {
  Scalar kappa;
  /// C_y for the least-squares branch, the Lipschitz constant C otherwise.
  Scalar c;
  Scalar u;
  Scalar alpha;
  Scalar beta;
  Scalar eta0;
  Scalar lambda;
  BoundBranch branch;
  bool truncated;
};

/// U = C kappa / lambda (sigma-admissible) or max(C_y/kappa, 2 C_y/lambda)
/// (least squares); alpha = 2 lambda U^2 (c eta lambda + 1/(eta lambda)) with
/// c = 2, or 10 under truncation; beta = U^2 / (2 eta).
template <typename Scalar>
BoundConstants<Scalar> compute_constants(Scalar kappa, Scalar c, Scalar eta0, Scalar lambda, BoundBranch branch,
                                         bool truncated) {
  if (!(kappa > Scalar(0))) throw ConfigError("bound constants: kappa must be > 0");
  if (!(c > Scalar(0))) throw ConfigError("bound constants: C (or C_y) must be > 0");
  if (!(eta0 > Scalar(0)) || !(lambda > Scalar(0))) throw ConfigError("bound constants: eta and lambda must be > 0");
  const Scalar eta_lambda = eta0 * lambda;
  if (!(eta_lambda < Scalar(1)))
    throw ConfigError("bound constants: eta * lambda < 1 violated (eta * lambda = " +
                      std::to_string(static_cast<double>(eta_lambda)) + ")");
  Scalar u;
  if (branch == BoundBranch::LeastSquares) {
    if (!(lambda > Scalar(2) * kappa * kappa))
      throw ConfigError("bound constants: lambda > 2 kappa^2 violated (lambda = " +
                        std::to_string(static_cast<double>(lambda)) +
                        ", 2 kappa^2 = " + std::to_string(static_cast<double>(2 * kappa * kappa)) + ")");
    u = std::max(c / kappa, Scalar(2) * c / lambda);
  } else {
    u = c * kappa / lambda;
  }
  const Scalar factor = truncated ? Scalar(10) : Scalar(2);
  BoundConstants<Scalar> out;
  out.kappa = kappa;
  out.c = c;
  out.u = u;
  out.alpha = Scalar(2) * lambda * u * u * (factor * eta_lambda + Scalar(1) / eta_lambda);
  out.beta = u * u / (Scalar(2) * eta0);
  out.eta0 = eta0;
  out.lambda = lambda;
  out.branch = branch;
  out.truncated = truncated;
  return out;
}

/// Per-step bound on |alpha_{t,t}|: eta_t C, or 2 eta_t C_y for least squares.
template <typename Scalar>
Scalar coefficient_norm_bound(const BoundConstants<Scalar>& consts, Scalar eta_t) {
  return consts.branch == BoundBranch::LeastSquares ? Scalar(2) * eta_t * consts.c : eta_t * consts.c;
}

/// Bound on |f_t|: C_y / kappa for least squares, C kappa / lambda otherwise.
template <typename Scalar>
Scalar hypothesis_norm_bound(const BoundConstants<Scalar>& consts) {
  return consts.branch == BoundBranch::LeastSquares ? consts.c / consts.kappa : consts.u;
}

template <typename Scalar>
struct BoundReport {
  long m;
  /// mean instantaneous regularized risk of the online run
  Scalar lhs;
  Scalar batch_risk;
  Scalar alpha_term;
  Scalar beta_term;
  Scalar rhs;
  Scalar slack;
};

template <typename Scalar>
BoundReport<Scalar> check_cumulative_bound(std::span<const StepResult<Scalar>> run_log, Scalar batch_risk,
                                           const BoundConstants<Scalar>& consts, long m) {
  using std::sqrt;
  if (m <= 0) throw ConfigError("cumulative bound: m must be >= 1");
  if (static_cast<long>(run_log.size()) != m)
    throw ConfigError("cumulative bound: run log has " + std::to_string(run_log.size()) + " steps, expected " +
                      std::to_string(m));
  Scalar sum(0);
  for (const auto& r : run_log) sum += r.instantaneous_risk;
  BoundReport<Scalar> out;
  out.m = m;
  out.lhs = sum / Scalar(m);
  out.batch_risk = batch_risk;
  out.alpha_term = consts.alpha / sqrt(Scalar(m));
  out.beta_term = consts.beta / Scalar(m);
  out.rhs = batch_risk + out.alpha_term + out.beta_term;
  out.slack = out.rhs - out.lhs;
  return out;
}

struct HypothesisCheck {
  std::string name;
  bool passed;
  /// Signed distance to the threshold; positive when satisfied.
  double margin;
  std::string detail;
};

template <typename Scalar>
struct Diagnostics {
  Scalar kappa_sq;
  Scalar c_y;
  std::vector<HypothesisCheck> checks;
  /// Branch under which the guarantee applies, if any.
  std::optional<BoundBranch> branch;
};

/// kappa^2 is the empirical maximum of |K(x,x)|_op over the inputs.
template <typename DerivedX, typename DerivedY>
Diagnostics<typename DerivedX::Scalar> check_hypotheses(const KernelSpec<typename DerivedX::Scalar>& kernel,
                                                        const Eigen::MatrixBase<DerivedX>& xs,
                                                        const Eigen::MatrixBase<DerivedY>& ys,
                                                        typename DerivedX::Scalar lambda,
                                                        const Loss<typename DerivedX::Scalar>& loss) {
  using Scalar = typename DerivedX::Scalar;
  Diagnostics<Scalar> out;
  out.kappa_sq = operator_norm_bound(kernel, xs);
  out.c_y = ys.cols() > 0 ? ys.colwise().norm().maxCoeff() : Scalar(0);

  const bool kernel_ok = std::isfinite(static_cast<double>(out.kappa_sq));
  out.checks.push_back({"kernel_bounded", kernel_ok, static_cast<double>(out.kappa_sq),
                        "kappa^2 = max_i |K(x_i,x_i)|_op over the sample (empirical)"});

  const bool sigma = loss.lipschitz().has_value();
  out.checks.push_back({"sigma_admissible", sigma, sigma ? static_cast<double>(*loss.lipschitz()) : 0.0,
                        sigma ? "convex and Lipschitz loss" : "squared loss has no global Lipschitz constant"});

  const bool squared = loss.kind() == LossKind::Squared;
  out.checks.push_back({"least_squares_loss", squared, squared ? 1.0 : 0.0, "loss = 1/2 |z - y|^2"});
  out.checks.push_back({"bounded_targets", out.c_y > Scalar(0), static_cast<double>(out.c_y), "C_y = max_i |y_i|"});
  const double margin = static_cast<double>(lambda - Scalar(2) * out.kappa_sq);
  out.checks.push_back({"lambda_gt_2kappa_sq", margin > 0.0, margin,
                        margin > 0.0 ? "lambda > 2 kappa^2" : "lambda <= 2 kappa^2: bound not guaranteed"});

  if (kernel_ok && squared && out.c_y > Scalar(0) && margin > 0.0)
    out.branch = BoundBranch::LeastSquares;
  else if (kernel_ok && sigma)
    out.branch = BoundBranch::SigmaAdmissible;
  return out;
}

namespace detail {
inline std::string fmt_real(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}
}  // namespace detail

/// Flat key = value text block.
template <typename Scalar>
std::string format_bound_report(const Diagnostics<Scalar>& diag, const std::optional<BoundConstants<Scalar>>& consts,
                                const std::optional<BoundReport<Scalar>>& report) {
  using detail::fmt_real;
  std::ostringstream os;
  os << "kappa_sq = " << fmt_real(static_cast<double>(diag.kappa_sq)) << "\n";
  os << "kappa_source = empirical_max_over_training_inputs\n";
  os << "c_y = " << fmt_real(static_cast<double>(diag.c_y)) << "\n";
  for (const auto& c : diag.checks) {
    os << "hypothesis." << c.name << " = " << (c.passed ? "pass" : "fail") << "\n";
    os << "hypothesis." << c.name << ".margin = " << fmt_real(c.margin) << "\n";
  }
  os << "branch = " << (diag.branch ? to_string(*diag.branch) : std::string("none")) << "\n";
  os << "guaranteed = " << (diag.branch ? "true" : "false") << "\n";
  if (consts) {
    os << "truncated = " << (consts->truncated ? "true" : "false") << "\n";
    os << "kappa = " << fmt_real(static_cast<double>(consts->kappa)) << "\n";
    os << "c = " << fmt_real(static_cast<double>(consts->c)) << "\n";
    os << "u = " << fmt_real(static_cast<double>(consts->u)) << "\n";
    os << "alpha = " << fmt_real(static_cast<double>(consts->alpha)) << "\n";
    os << "beta = " << fmt_real(static_cast<double>(consts->beta)) << "\n";
    os << "eta = " << fmt_real(static_cast<double>(consts->eta0)) << "\n";
    os << "lambda = " << fmt_real(static_cast<double>(consts->lambda)) << "\n";
  }
  if (report) {
    os << "m = " << report->m << "\n";
    os << "lhs = " << fmt_real(static_cast<double>(report->lhs)) << "\n";
    os << "batch_risk = " << fmt_real(static_cast<double>(report->batch_risk)) << "\n";
    os << "alpha_term = " << fmt_real(static_cast<double>(report->alpha_term)) << "\n";
    os << "beta_term = " << fmt_real(static_cast<double>(report->beta_term)) << "\n";
    os << "rhs = " << fmt_real(static_cast<double>(report->rhs)) << "\n";
    os << "slack = " << fmt_real(static_cast<double>(report->slack)) << "\n";
    os << "bound_holds = " << (report->slack >= Scalar(-1e-9) ? "true" : "false") << "\n";
  }
  return os.str();
}

}  // namespace ovk
