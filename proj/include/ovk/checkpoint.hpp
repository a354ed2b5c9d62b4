#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "ovk/batch.hpp"
#include "ovk/monorma.hpp"
#include "ovk/onorma.hpp"

namespace ovk {

/// Versioned line-oriented text format. Effective coefficients are written
/// with 17 significant digits, so a load reproduces the saved model's
/// predictions up to the rounding of the lazy scale.
///
///   ovk-checkpoint 1
///   model onorma|monorma|batch
///   lambda <v>
///   eta0 <v>                  (online models)
///   truncation none | truncation <t0> <epsilon>
///   r <v>                     (monorma)
///   step <t>
///   kernels <m>
///   kernel gaussian <mu> <d>  followed by: structure <d*d values, row-major>
///   kernel poly <mu> <d>
///   delta <m values>          (monorma)
///   gamma <m values>          (monorma)
///   terms <n> <p> <d>
///   <index> <p input values> <d coefficient values>   (n lines)
///   end
inline constexpr int kCheckpointVersion = 1;

using AnyModel = std::variant<ExpansionModel<double>, MultiKernelModel<double>, BatchModel<double>>;

void save_checkpoint(std::ostream& out, const ExpansionModel<double>& model);
void save_checkpoint(std::ostream& out, const MultiKernelModel<double>& model);
void save_checkpoint(std::ostream& out, const BatchModel<double>& model);

/// Throws ParseError on malformed or unsupported-version input.
AnyModel load_checkpoint(std::istream& in);

void save_checkpoint_file(const std::string& path, const AnyModel& model);
AnyModel load_checkpoint_file(const std::string& path);

/// Prediction for whichever model the variant holds.
Eigen::VectorXd predict_any(const AnyModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace ovk
