#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "orthonet/grid.hpp"
#include "orthonet/system.hpp"

namespace orthonet {

struct ChartMeta {
  std::string name;
  std::vector<std::string> parameters;
  std::array<double, 3> box_lo{};
  std::array<double, 3> box_hi{};
  std::string classification;   ///< "guichard", "1-system" or "control"
  std::string description;
};

/// A closed-form reference system.
///
/// Lame coefficients and their gradients are exact (forward-mode automatic
/// differentiation of the closed forms). Charts obtained by a Combescure
/// transform of another chart (associated and dual systems) share that chart's
/// frame and rotational coefficients and carry no closed-form parametrization.
class AnalyticChart {
 public:
  using Point = Eigen::Vector3d;

  const ChartMeta& meta() const { return meta_; }
  const std::string& name() const { return meta_.name; }
  double parameter() const { return c_; }
  std::string provenance() const;

  bool valid(const Point& p) const;
  std::array<double, 3> lame(const Point& p) const;
  /// Row j is the gradient of H_j.
  Eigen::Matrix3d lame_jacobian(const Point& p) const;
  /// Rows are N_1, N_2, N_3.
  Eigen::Matrix3d frame(const Point& p) const;
  /// beta(i, j) = d_i H_j / H_i, zero diagonal.
  Eigen::Matrix3d rotational(const Point& p) const;
  std::optional<Point> position(const Point& p) const;

  struct Definition;
  explicit AnalyticChart(std::shared_ptr<const Definition> def, double c);

 private:
  std::shared_ptr<const Definition> def_;
  ChartMeta meta_;
  double c_;
};

/// Registry names are kebab-case; underscores are accepted as well.
std::vector<std::string> chart_names();
std::vector<ChartMeta> list_charts();
AnalyticChart instantiate(std::string_view name, double c = 0.0);

/// Sample a chart: exact H, N and beta; f from the closed form when the chart
/// has one, otherwise integrated from df = sum H_i N_i dx_i with f(anchor) = base_point
/// (defaults: grid corner, origin). Throws std::domain_error on nodes outside
/// the chart's domain of validity.
OrthogonalSystem sample(const AnalyticChart& chart, const GridSpec& grid, const Node& anchor = {0, 0, 0},
                        const Eigen::Vector3d& base_point = Eigen::Vector3d::Zero());

/// Exact fields of a chart without assembling a system.
std::array<ScalarField, 3> sample_lame(const AnalyticChart& chart, const GridSpec& grid);

/// Variant of the dual third Lame coefficient with leading term -sqrt(2) D^2
/// instead of -sqrt(2) D^2 / 2. It violates the Guichard condition (trace -24
/// at (1, 1, 1) for c = 0).
double six_sphere_dual_printed_h3(const Eigen::Vector3d& p, double c);

nlohmann::json to_json(const ChartMeta& meta);

}  // namespace orthonet
