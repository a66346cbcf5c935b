#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthonet/residual.hpp"

namespace orthonet::cli {

/// Exit codes of a run.
enum ExitCode : int { kPass = 0, kUsage = 1, kCheckFailed = 2 };

/// Thrown for an invalid configuration (unknown chart, bad grid, schema violation).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One run. JSON keys are the field names; flags use dashes instead of underscores.
struct RunConfig {
  std::string operation = "verify";   ///< verify, associate, dualize, backlund, decompose, analyze, export
  std::string chart = "six-sphere";
  double chart_c = 0.0;
  int n = 33;
  std::optional<std::array<double, 3>> lo, hi;   ///< default: the chart's box
  std::optional<std::array<int, 3>> base;        ///< default: the middle node

  std::vector<std::string> checks{"orthogonality", "lame", "metric", "beta"};
  double c = 0.5;   ///< member of the associated family
  double alpha = 1.0;
  double lambda = 0.0;
  std::array<double, 6> seed{1, 1, 0, 1, 1, 0};   ///< gamma(base), gammabar(base)
  bool permutability = false;

  std::optional<int> axis;   ///< analyze: one family; export: slice axis (default 2)
  std::vector<int> slices;   ///< export: slice indices (default: the middle one)
  std::string format = "obj";
  std::string field = "chi";        ///< csv export: H1, H2, H3, chi, x, y, z
  std::string source = "seed";      ///< export: seed, associated, dual, backlund

  CheckOptions check;
  std::string output;            ///< report path; empty writes to stdout
  std::string export_dir = ".";
};

nlohmann::json to_json(const RunConfig& cfg);

/// Missing keys keep their defaults; unknown keys and a wrong "schema" are usage errors.
RunConfig config_from_json(const nlohmann::json& j);

/// Execute a validated configuration and write the JSON report.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Build the JSON report without writing it; sets `exit_code`.
nlohmann::json run_report(const RunConfig& cfg, int& exit_code);

/// Parse argv and run. `list-charts` prints the chart registry.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace orthonet::cli
