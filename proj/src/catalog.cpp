#include "orthonet/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <ceres/jet.h>

#include "format.hpp"

namespace orthonet {

namespace {

using J = ceres::Jet<double, 3>;
using Jets = std::array<J, 3>;
const double kSqrt2 = std::sqrt(2.0);

template <class T>
T six_sphere_d(const std::array<T, 3>& p) {
  return p[0] * p[0] + p[1] * p[1] + 2.0 * p[2] * p[2];
}

Jets flat_f(const Jets& p) { return {p[0], p[1], kSqrt2 * p[2]}; }
Jets flat_H(const Jets&) { return {J(1.0), J(1.0), J(kSqrt2)}; }

// Inverted flat chart, followed by a reflection in the third axis so that the
// frame is right-handed.
Jets six_sphere_f(const Jets& p) {
  const J D = six_sphere_d(p);
  return {p[0] / D, p[1] / D, -kSqrt2 * p[2] / D};
}
Jets six_sphere_H(const Jets& p) {
  const J D = six_sphere_d(p);
  return {1.0 / D, 1.0 / D, kSqrt2 / D};
}

Jets spherical_f(const Jets& p) {
  using std::cos;
  using std::sin;
  const J& r = p[0];
  return {r * sin(p[1]) * cos(p[2]), r * sin(p[1]) * sin(p[2]), r * cos(p[1])};
}
Jets spherical_H(const Jets& p) {
  using std::sin;
  return {J(1.0), p[0], p[0] * sin(p[1])};
}

bool away_from_origin(const Eigen::Vector3d& p) { return six_sphere_d(std::array<double, 3>{p[0], p[1], p[2]}) > 1e-12; }

}  // namespace

struct AnalyticChart::Definition {
  ChartMeta meta;
  std::function<Jets(const Jets&, double)> H;
  std::function<Jets(const Jets&)> carrier_f;   // parametrization carrying the frame
  std::function<Jets(const Jets&)> carrier_H;
  bool own_position = true;
  std::function<bool(const Eigen::Vector3d&)> valid;
};

namespace {

using Def = AnalyticChart::Definition;

std::vector<std::shared_ptr<const Def>> registry() {
  std::vector<std::shared_ptr<const Def>> out;

  out.push_back(std::make_shared<Def>(Def{
      {"flat-guichard", {}, {-1, -1, -1}, {1, 1, 1}, "guichard", "f = (x, y, sqrt2 z), H = (1, 1, sqrt2)"},
      [](const Jets& p, double) { return flat_H(p); }, flat_f, flat_H, true,
      [](const Eigen::Vector3d&) { return true; }}));

  out.push_back(std::make_shared<Def>(Def{
      {"six-sphere",
       {},
       {0.5, 0.5, 0.5},
       {1.5, 1.5, 1.5},
       "guichard",
       "6-sphere coordinates, H = (1, 1, sqrt2) / D with D = x^2 + y^2 + 2 z^2"},
      [](const Jets& p, double) { return six_sphere_H(p); }, six_sphere_f, six_sphere_H, true, away_from_origin}));

  out.push_back(std::make_shared<Def>(Def{
      {"six-sphere-associated",
       {"c"},
       {0.5, 0.5, 0.5},
       {1.5, 1.5, 1.5},
       "1-system",
       "associated systems of the 6-sphere coordinates"},
      [](const Jets& p, double c) {
        const J D = six_sphere_d(p);
        const J &x = p[0], &y = p[1], &z = p[2];
        return Jets{(c + kSqrt2 * (y * y + z * z)) / D, (c - kSqrt2 * (x * x + z * z)) / D,
                      (kSqrt2 * c - x * x + y * y) / D};
      },
      six_sphere_f, six_sphere_H, false, away_from_origin}));

  out.push_back(std::make_shared<Def>(Def{
      {"six-sphere-dual",
       {"c"},
       {0.5, 0.5, 0.5},
       {1.5, 1.5, 1.5},
       "guichard",
       "dual systems of the 6-sphere coordinates"},
      [](const Jets& p, double c) {
        const J D = six_sphere_d(p);
        const J &x = p[0], &y = p[1], &z = p[2];
        const J a = c + kSqrt2 * (y * y + z * z), b = c - kSqrt2 * (x * x + z * z);
        const J e = c + (y * y - x * x) / kSqrt2;
        return Jets{(D * D - a * a) / D, (D * D - b * b) / D, (-kSqrt2 * D * D / 2.0 - kSqrt2 * e * e) / D};
      },
      six_sphere_f, six_sphere_H, false, away_from_origin}));

  out.push_back(std::make_shared<Def>(Def{
      {"spherical-control",
       {},
       {1.0, 0.6, 0.0},
       {2.0, 1.4, 1.0},
       "control",
       "spherical coordinates (r, theta, phi), H = (1, r, r sin theta)"},
      [](const Jets& p, double) { return spherical_H(p); }, spherical_f, spherical_H, true,
      [](const Eigen::Vector3d& p) { return p[0] > 1e-12 && std::abs(std::sin(p[1])) > 1e-12; }}));

  return out;
}

const std::vector<std::shared_ptr<const Def>>& charts() {
  static const auto reg = registry();
  return reg;
}

Jets seed(const Eigen::Vector3d& p) {
  Jets x;
  for (int a = 0; a < 3; ++a) x[a] = J(p[a], a);
  return x;
}

std::string canonical(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

}  // namespace

AnalyticChart::AnalyticChart(std::shared_ptr<const Definition> def, double c)
    : def_(std::move(def)), meta_(def_->meta), c_(c) {}

std::string AnalyticChart::provenance() const {
  if (meta_.parameters.empty()) return meta_.name;
  return meta_.name + "(c=" + detail::format_number(c_) + ")";
}

bool AnalyticChart::valid(const Point& p) const { return def_->valid(p); }

std::array<double, 3> AnalyticChart::lame(const Point& p) const {
  const Jets H = def_->H(seed(p), c_);
  return {H[0].a, H[1].a, H[2].a};
}

Eigen::Matrix3d AnalyticChart::lame_jacobian(const Point& p) const {
  const Jets H = def_->H(seed(p), c_);
  Eigen::Matrix3d out;
  for (int j = 0; j < 3; ++j) out.row(j) = H[j].v.transpose();
  return out;
}

Eigen::Matrix3d AnalyticChart::frame(const Point& p) const {
  const Jets f = def_->carrier_f(seed(p));
  const Jets H = def_->carrier_H(seed(p));
  Eigen::Matrix3d N;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) N(i, c) = f[c].v[i] / H[i].a;
  return N;
}

Eigen::Matrix3d AnalyticChart::rotational(const Point& p) const {
  const Jets H = def_->carrier_H(seed(p));
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) b(i, j) = H[j].v[i] / H[i].a;
  return b;
}

std::optional<AnalyticChart::Point> AnalyticChart::position(const Point& p) const {
  if (!def_->own_position) return std::nullopt;
  const Jets f = def_->carrier_f(seed(p));
  return Point(f[0].a, f[1].a, f[2].a);
}

std::vector<std::string> chart_names() {
  std::vector<std::string> out;
  for (const auto& d : charts()) out.push_back(d->meta.name);
  return out;
}

std::vector<ChartMeta> list_charts() {
  std::vector<ChartMeta> out;
  for (const auto& d : charts()) out.push_back(d->meta);
  return out;
}

AnalyticChart instantiate(std::string_view name, double c) {
  const std::string key = canonical(name);
  for (const auto& d : charts())
    if (d->meta.name == key) return AnalyticChart(d, d->meta.parameters.empty() ? 0.0 : c);
  throw std::invalid_argument("unknown chart '" + std::string(name) + "'");
}

std::array<ScalarField, 3> sample_lame(const AnalyticChart& chart, const GridSpec& grid) {
  std::array<ScalarField, 3> H{ScalarField(grid), ScalarField(grid), ScalarField(grid)};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Eigen::Vector3d x = grid.point(grid.node(p));
    if (!chart.valid(x)) throw DegenerateNode("chart " + chart.name() + " is singular", grid.node(p));
    const auto h = chart.lame(x);
    for (int i = 0; i < 3; ++i) H[i].values()[p] = h[i];
  }
  return H;
}

OrthogonalSystem sample(const AnalyticChart& chart, const GridSpec& grid, const Node& anchor,
                        const Eigen::Vector3d& base_point) {
  if (!grid.contains(anchor)) throw std::out_of_range("anchor outside the grid");
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (!chart.valid(grid.point(grid.node(p))))
      throw std::domain_error("grid leaves the domain of chart " + chart.name());

  auto H = sample_lame(chart, grid);
  std::array<VectorField, 3> N{VectorField(grid), VectorField(grid), VectorField(grid)};
  BetaFields beta;
  for (auto& row : beta)
    for (auto& b : row) b = ScalarField(grid);
  VectorField f(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Eigen::Vector3d x = grid.point(grid.node(p));
    const Eigen::Matrix3d frame = chart.frame(x), b = chart.rotational(x);
    for (int i = 0; i < 3; ++i) {
      for (int c = 0; c < 3; ++c) N[i].c[c].values()[p] = frame(i, c);
      for (int j = 0; j < 3; ++j) beta[i][j].values()[p] = b(i, j);
    }
    if (const auto pos = chart.position(x))
      for (int c = 0; c < 3; ++c) f.c[c].values()[p] = (*pos)[c];
  }
  std::optional<Node> anchored;
  if (!chart.position(grid.point(anchor))) {
    for (int c = 0; c < 3; ++c) {
      const OneForm w{{H[0] * N[0].c[c], H[1] * N[1].c[c], H[2] * N[2].c[c]}};
      f.c[c] = integrate_oneform(w, anchor, base_point[c]);
    }
    anchored = anchor;
  }
  auto sys = assemble_system(std::move(f), std::move(H), std::move(N), std::move(beta), chart.provenance());
  sys.anchor = anchored;
  return sys;
}

double six_sphere_dual_printed_h3(const Eigen::Vector3d& p, double c) {
  const double D = p[0] * p[0] + p[1] * p[1] + 2 * p[2] * p[2];
  const double e = c + (p[1] * p[1] - p[0] * p[0]) / kSqrt2;
  return (-kSqrt2 * D * D - kSqrt2 * e * e) / D;
}

nlohmann::json to_json(const ChartMeta& meta) {
  return {{"name", meta.name},
          {"parameters", meta.parameters},
          {"box", {{"lo", meta.box_lo}, {"hi", meta.box_hi}}},
          {"classification", meta.classification},
          {"description", meta.description}};
}

}  // namespace orthonet
