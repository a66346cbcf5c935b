#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthonet/grid.hpp"

namespace orthonet {

/// Knobs shared by every residual check.
struct CheckOptions {
  int order = 2;                     ///< finite difference order (2 or 4)
  int collar = 2;                    ///< boundary layers excluded from norms
  double factor = 5.0;               ///< tolerance = factor * h^2 * scale
  std::optional<double> tolerance;   ///< absolute override
};

/// Sup/RMS summary of one or more residual fields.
///
/// `pass` is exactly `sup <= tolerance`; a NaN anywhere fails the report.
struct ResidualReport {
  std::string name;
  double sup = 0.0;
  double rms = 0.0;
  double tolerance = 0.0;
  double scale = 0.0;
  bool pass = true;
  bool collar_excluded = false;
  GridSpec grid;
  std::optional<Node> worst;
  double masked_fraction = 0.0;
  std::string note;
};

/// Thrown when a precondition check fails; carries the offending report.
class CheckFailed : public std::runtime_error {
 public:
  explicit CheckFailed(ResidualReport report);
  const ResidualReport& report() const { return report_; }

 private:
  ResidualReport report_;
};

/// Thrown for pointwise degeneracies (vanishing Lame coefficient, |f| = 0, ...).
class DegenerateNode : public std::domain_error {
 public:
  DegenerateNode(const std::string& what, const Node& node);
  const Node& node() const { return node_; }

 private:
  Node node_;
};

/// Node mask: true means the node takes part in the norms.
std::vector<char> collar_mask(const GridSpec& grid, int collar);

/// Default tolerance max(1e-8, factor * h^2 * scale).
double default_tolerance(const GridSpec& grid, double scale, const CheckOptions& opts);

/// Sup of |field| over the collar-restricted node set, across all fields.
double sup_over(std::span<const ScalarField> fields, int collar);

/// Build a report from residual fields. `mask` (optional) further restricts
/// the node set; the masked fraction is recorded.
ResidualReport summarize(std::string name, std::span<const ScalarField> residuals, double scale,
                         const CheckOptions& opts, const std::vector<char>* mask = nullptr);

/// Report with an externally computed sup (for values that are not fields).
ResidualReport scalar_report(std::string name, double sup, double tolerance, const GridSpec& grid);

/// Antisymmetrised mixed partials d_i g_j - d_j g_i of a 1-form.
ResidualReport closedness_residual(const OneForm& form, const CheckOptions& opts = {});

/// Options for the integrability guards run inside constructions: fourth order
/// stencils, so that exactly closed integrands with large higher derivatives
/// stay well inside the second order tolerance.
inline CheckOptions integrability_guard(CheckOptions opts) {
  opts.order = 4;
  return opts;
}

bool all_pass(std::span<const ResidualReport> reports);

nlohmann::json to_json(const GridSpec& grid);
nlohmann::json to_json(const ResidualReport& report);

}  // namespace orthonet
