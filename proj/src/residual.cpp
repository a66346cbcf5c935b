#include "orthonet/residual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orthonet {

CheckFailed::CheckFailed(ResidualReport report)
    : std::runtime_error("check failed: " + report.name), report_(std::move(report)) {}

DegenerateNode::DegenerateNode(const std::string& what, const Node& node)
    : std::domain_error(what + " at node (" + std::to_string(node[0]) + "," + std::to_string(node[1]) + "," +
                        std::to_string(node[2]) + ")"),
      node_(node) {}

std::vector<char> collar_mask(const GridSpec& grid, int collar) {
  std::vector<char> mask(grid.size(), 1);
  if (collar <= 0) return mask;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Node nd = grid.node(p);
    for (int a = 0; a < 3; ++a)
      if (nd[a] < collar || nd[a] >= grid.n(a) - collar) mask[p] = 0;
  }
  return mask;
}

double default_tolerance(const GridSpec& grid, double scale, const CheckOptions& opts) {
  if (opts.tolerance) return *opts.tolerance;
  const double h = grid.max_spacing();
  return std::max(1e-8, opts.factor * h * h * scale);
}

double sup_over(std::span<const ScalarField> fields, int collar) {
  if (fields.empty()) return 0.0;
  const auto mask = collar_mask(fields[0].grid(), collar);
  double sup = 0.0;
  for (const auto& f : fields)
    for (std::size_t p = 0; p < mask.size(); ++p)
      if (mask[p]) {
        const double v = std::abs(f.values()[p]);
        if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
        sup = std::max(sup, v);
      }
  return sup;
}

ResidualReport summarize(std::string name, std::span<const ScalarField> residuals, double scale,
                         const CheckOptions& opts, const std::vector<char>* mask) {
  ResidualReport r;
  r.name = std::move(name);
  r.scale = scale;
  r.collar_excluded = opts.collar > 0;
  if (residuals.empty()) {
    r.tolerance = opts.tolerance.value_or(1e-8);
    return r;
  }
  r.grid = residuals[0].grid();
  auto keep = collar_mask(r.grid, opts.collar);
  std::size_t excluded_by_mask = 0, collar_nodes = 0;
  for (std::size_t p = 0; p < keep.size(); ++p) {
    if (!keep[p]) continue;
    ++collar_nodes;
    if (mask && !(*mask)[p]) {
      keep[p] = 0;
      ++excluded_by_mask;
    }
  }
  r.masked_fraction = collar_nodes ? double(excluded_by_mask) / double(collar_nodes) : 0.0;

  double sum2 = 0.0;
  std::size_t count = 0;
  std::optional<Node> nan_node;
  for (const auto& f : residuals) {
    detail::require_same_grid(r.grid, f.grid());
    for (std::size_t p = 0; p < keep.size(); ++p) {
      if (!keep[p]) continue;
      const double v = f.values()[p];
      if (!std::isfinite(v)) {
        if (!nan_node) nan_node = r.grid.node(p);
        continue;
      }
      if (std::abs(v) >= r.sup) {
        r.sup = std::abs(v);
        r.worst = r.grid.node(p);
      }
      sum2 += v * v;
      ++count;
    }
  }
  if (nan_node) {
    r.sup = std::numeric_limits<double>::quiet_NaN();
    r.worst = nan_node;
  }
  r.rms = count ? std::sqrt(sum2 / double(count)) : 0.0;
  r.tolerance = default_tolerance(r.grid, scale, opts);
  r.pass = !nan_node && r.sup <= r.tolerance;
  return r;
}

ResidualReport scalar_report(std::string name, double sup, double tolerance, const GridSpec& grid) {
  ResidualReport r;
  r.name = std::move(name);
  r.sup = std::abs(sup);
  r.rms = std::abs(sup);
  r.tolerance = tolerance;
  r.grid = grid;
  r.pass = std::isfinite(sup) && r.sup <= tolerance;
  return r;
}

ResidualReport closedness_residual(const OneForm& form, const CheckOptions& opts) {
  std::vector<ScalarField> res;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const ScalarField a = partial_derivative(form.g[j], i, opts.order);
      const ScalarField b = partial_derivative(form.g[i], j, opts.order);
      res.push_back(a - b);
      const ScalarField both[] = {a, b};
      scale = std::max(scale, sup_over(both, opts.collar));
    }
  return summarize("closedness", res, scale, opts);
}

bool all_pass(std::span<const ResidualReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const ResidualReport& r) { return r.pass; });
}

nlohmann::json to_json(const GridSpec& grid) {
  return {{"lo", grid.lo()}, {"hi", grid.hi()}, {"n", grid.n()}};
}

namespace {
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}
}  // namespace

nlohmann::json to_json(const ResidualReport& r) {
  nlohmann::json j{{"name", r.name},
                   {"sup", number(r.sup)},
                   {"rms", number(r.rms)},
                   {"tolerance", number(r.tolerance)},
                   {"scale", number(r.scale)},
                   {"pass", r.pass},
                   {"grid", to_json(r.grid)},
                   {"collar_excluded", r.collar_excluded}};
  if (r.worst) j["worst_node"] = *r.worst;
  if (r.masked_fraction > 0.0) j["masked_fraction"] = r.masked_fraction;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

}  // namespace orthonet
