#include "orthonet/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace orthonet {

GridSpec::GridSpec() : lo_{0, 0, 0}, hi_{1, 1, 1}, n_{5, 5, 5} {}

GridSpec::GridSpec(const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                   const std::array<int, 3>& n)
    : lo_(lo), hi_(hi), n_(n) {
  for (int a = 0; a < 3; ++a) {
    if (n_[a] < 5)
      throw std::invalid_argument("grid axis " + std::to_string(a) + " needs at least 5 nodes");
    if (!(hi_[a] > lo_[a]) || !std::isfinite(lo_[a]) || !std::isfinite(hi_[a]))
      throw std::invalid_argument("grid axis " + std::to_string(a) + " has an empty interval");
  }
}

GridSpec GridSpec::cube(double lo, double hi, int n) { return GridSpec({lo, lo, lo}, {hi, hi, hi}, {n, n, n}); }

double GridSpec::max_spacing() const { return std::max({spacing(0), spacing(1), spacing(2)}); }

Eigen::Vector3d GridSpec::point(const Node& node) const {
  return {coord(0, node[0]), coord(1, node[1]), coord(2, node[2])};
}

std::size_t GridSpec::stride(int axis) const {
  switch (axis) {
    case 0: return std::size_t(n_[1]) * n_[2];
    case 1: return std::size_t(n_[2]);
    case 2: return 1;
  }
  throw std::out_of_range("axis must be 0, 1 or 2");
}

Node GridSpec::node(std::size_t flat) const {
  const int k = int(flat % n_[2]);
  flat /= n_[2];
  const int j = int(flat % n_[1]);
  return {int(flat / n_[1]), j, k};
}

bool GridSpec::contains(const Node& node) const {
  for (int a = 0; a < 3; ++a)
    if (node[a] < 0 || node[a] >= n_[a]) return false;
  return true;
}

Node GridSpec::nearest_node(const Eigen::Vector3d& p) const {
  Node out{};
  for (int a = 0; a < 3; ++a) {
    const long i = std::lround((p[a] - lo_[a]) / spacing(a));
    out[a] = int(std::clamp<long>(i, 0, n_[a] - 1));
  }
  return out;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const GridSpec& grid, double value)
    : grid_(grid), values_(Eigen::ArrayXd::Constant(Eigen::Index(grid.size()), value)) {}

ScalarField::ScalarField(const GridSpec& grid, Eigen::ArrayXd values) : grid_(grid), values_(std::move(values)) {
  if (std::size_t(values_.size()) != grid_.size())
    throw std::invalid_argument("field value count does not match the grid");
}

double ScalarField::sup_abs() const { return values_.size() ? values_.abs().maxCoeff() : 0.0; }

bool ScalarField::all_finite() const { return values_.allFinite(); }

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  detail::require_same_grid(grid_, o.grid_);
  values_ += o.values_;
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  detail::require_same_grid(grid_, o.grid_);
  values_ -= o.values_;
  return *this;
}
ScalarField& ScalarField::operator*=(const ScalarField& o) {
  detail::require_same_grid(grid_, o.grid_);
  values_ *= o.values_;
  return *this;
}
ScalarField& ScalarField::operator*=(double s) {
  values_ *= s;
  return *this;
}

#define ORTHONET_FIELD_OP(op)                                                         \
  ScalarField operator op(const ScalarField& a, const ScalarField& b) {               \
    detail::require_same_grid(a.grid(), b.grid());                                    \
    return {a.grid(), a.values() op b.values()};                                      \
  }                                                                                   \
  ScalarField operator op(const ScalarField& a, double s) { return {a.grid(), a.values() op s}; } \
  ScalarField operator op(double s, const ScalarField& a) { return {a.grid(), s op a.values()}; }

ORTHONET_FIELD_OP(+)
ORTHONET_FIELD_OP(-)
ORTHONET_FIELD_OP(*)
ORTHONET_FIELD_OP(/)
#undef ORTHONET_FIELD_OP

ScalarField square(const ScalarField& a) { return {a.grid(), a.values().square()}; }
ScalarField sqrt(const ScalarField& a) { return {a.grid(), a.values().sqrt()}; }
ScalarField abs(const ScalarField& a) { return {a.grid(), a.values().abs()}; }

// ---------------------------------------------------------------------------

Eigen::Vector3d VectorField::at(const Node& node) const { return {c[0].at(node), c[1].at(node), c[2].at(node)}; }

Eigen::Vector3d VectorField::at(std::size_t flat) const {
  return {c[0].values()[flat], c[1].values()[flat], c[2].values()[flat]};
}

double VectorField::sup_norm() const { return std::sqrt(norm2(*this).values().maxCoeff()); }

VectorField operator+(const VectorField& a, const VectorField& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
VectorField operator-(const VectorField& a, const VectorField& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
VectorField operator*(const ScalarField& s, const VectorField& v) { return {s * v[0], s * v[1], s * v[2]}; }
VectorField operator*(double s, const VectorField& v) { return {s * v[0], s * v[1], s * v[2]}; }
ScalarField dot(const VectorField& a, const VectorField& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
VectorField cross(const VectorField& a, const VectorField& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
ScalarField norm2(const VectorField& a) { return dot(a, a); }

// ---------------------------------------------------------------------------

namespace detail {

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

void differentiate_line(const double* in, std::ptrdiff_t s, int n, double h, int order, double* out,
                        std::ptrdiff_t os) {
  auto f = [&](int i) { return in[i * s]; };
  auto o = [&](int i) -> double& { return out[i * os]; };
  if (order == 2) {
    const double c = 1.0 / (2.0 * h);
    o(0) = c * (-3.0 * f(0) + 4.0 * f(1) - f(2));
    for (int i = 1; i < n - 1; ++i) o(i) = c * (f(i + 1) - f(i - 1));
    o(n - 1) = c * (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3));
  } else if (order == 4) {
    const double c = 1.0 / (12.0 * h);
    o(0) = c * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4));
    o(1) = c * (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4));
    for (int i = 2; i < n - 2; ++i) o(i) = c * (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2));
    o(n - 2) = c * (3.0 * f(n - 1) + 10.0 * f(n - 2) - 18.0 * f(n - 3) + 6.0 * f(n - 4) - f(n - 5));
    o(n - 1) = c * (25.0 * f(n - 1) - 48.0 * f(n - 2) + 36.0 * f(n - 3) - 16.0 * f(n - 4) + 3.0 * f(n - 5));
  } else {
    throw std::invalid_argument("derivative order must be 2 or 4");
  }
}

void second_difference_line(const double* in, std::ptrdiff_t s, int n, double h, int order, double* out,
                            std::ptrdiff_t os) {
  auto f = [&](int i) { return in[i * s]; };
  auto o = [&](int i) -> double& { return out[i * os]; };
  if (order == 2) {
    const double c = 1.0 / (h * h);
    o(0) = c * (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3));
    for (int i = 1; i < n - 1; ++i) o(i) = c * (f(i + 1) - 2.0 * f(i) + f(i - 1));
    o(n - 1) = c * (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4));
  } else if (order == 4) {
    const double c = 1.0 / (12.0 * h * h);
    auto edge0 = [&](auto g) { return c * (45 * g(0) - 154 * g(1) + 214 * g(2) - 156 * g(3) + 61 * g(4) - 10 * g(5)); };
    auto edge1 = [&](auto g) { return c * (10 * g(0) - 15 * g(1) - 4 * g(2) + 14 * g(3) - 6 * g(4) + g(5)); };
    auto mirrored = [&](int i) { return f(n - 1 - i); };
    o(0) = edge0(f);
    o(1) = edge1(f);
    for (int i = 2; i < n - 2; ++i)
      o(i) = c * (-f(i - 2) + 16.0 * f(i - 1) - 30.0 * f(i) + 16.0 * f(i + 1) - f(i + 2));
    o(n - 2) = edge1(mirrored);
    o(n - 1) = edge0(mirrored);
  } else {
    throw std::invalid_argument("derivative order must be 2 or 4");
  }
}

void integrate_line(const double* g, std::ptrdiff_t s, int n, double h, int base, double base_value, double* out) {
  out[base * s] = base_value;
  for (int i = base + 1; i < n; ++i) out[i * s] = out[(i - 1) * s] + 0.5 * h * (g[i * s] + g[(i - 1) * s]);
  for (int i = base - 1; i >= 0; --i) out[i * s] = out[(i + 1) * s] - 0.5 * h * (g[i * s] + g[(i + 1) * s]);
}

}  // namespace detail

namespace {

template <class Kernel>
ScalarField apply_along(const ScalarField& field, int axis, int order, int min_nodes, Kernel&& kernel) {
  if (axis < 0 || axis > 2) throw std::out_of_range("axis must be 0, 1 or 2");
  if (order != 2 && order != 4) throw std::invalid_argument("derivative order must be 2 or 4");
  const GridSpec& g = field.grid();
  if (g.n(axis) < min_nodes) throw std::invalid_argument("grid too small for the stencil");

  ScalarField out(g);
  const auto s = std::ptrdiff_t(g.stride(axis));
  const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
  const double* in = field.values().data();
  double* dst = out.values().data();
  for (int p = 0; p < g.n(a1); ++p)
    for (int q = 0; q < g.n(a2); ++q) {
      Node start{};
      start[a1] = p;
      start[a2] = q;
      const std::size_t off = g.index(start);
      kernel(in + off, s, g.n(axis), g.spacing(axis), order, dst + off, s);
    }
  return out;
}

}  // namespace

ScalarField partial_derivative(const ScalarField& field, int axis, int order) {
  return apply_along(field, axis, order, order == 2 ? 3 : 5, detail::differentiate_line);
}

ScalarField second_partial_derivative(const ScalarField& field, int axis, int order) {
  return apply_along(field, axis, order, order == 2 ? 4 : 6, detail::second_difference_line);
}

ScalarField integrate_oneform(const OneForm& form, const Node& base, double base_value) {
  return integrate_oneform(form, base, base_value, {0, 1, 2});
}

ScalarField integrate_oneform(const OneForm& form, const Node& base, double base_value,
                              const std::array<int, 3>& sweep) {
  const GridSpec& g = form.grid();
  for (int a = 1; a < 3; ++a) detail::require_same_grid(g, form.g[a].grid());
  if (!g.contains(base)) throw std::out_of_range("base node outside the grid");

  ScalarField out(g, 0.0);
  double* dst = out.values().data();
  out.values()[g.index(base)] = base_value;

  for (int stage = 0; stage < 3; ++stage) {
    const int axis = sweep[stage];
    const auto s = std::ptrdiff_t(g.stride(axis));
    const double* gv = form.g[axis].values().data();
    // Axes already swept range freely, the others are pinned to the base.
    std::array<int, 3> lo = base, hi = base;
    for (int prev = 0; prev < stage; ++prev) {
      lo[sweep[prev]] = 0;
      hi[sweep[prev]] = g.n(sweep[prev]) - 1;
    }
    lo[axis] = base[axis];
    hi[axis] = base[axis];
    for (int i = lo[0]; i <= hi[0]; ++i)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int k = lo[2]; k <= hi[2]; ++k) {
          Node start{i, j, k};
          const std::size_t off = g.index(start) - std::size_t(base[axis]) * std::size_t(s);
          detail::integrate_line(gv + off, s, g.n(axis), g.spacing(axis), base[axis], dst[g.index(start)],
                                 dst + off);
        }
  }
  return out;
}

void write_csv(std::ostream& os, const ScalarField& field) {
  const GridSpec& g = field.grid();
  os << "i,j,k,x,y,z,value\n" << std::setprecision(17);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Node nd = g.node(p);
    os << nd[0] << ',' << nd[1] << ',' << nd[2] << ',' << g.coord(0, nd[0]) << ',' << g.coord(1, nd[1]) << ','
       << g.coord(2, nd[2]) << ',' << field.values()[p] << '\n';
  }
}

}  // namespace orthonet
