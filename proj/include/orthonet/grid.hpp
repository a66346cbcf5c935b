#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>

#include <Eigen/Core>

namespace orthonet {

/// Lattice node index (i1, i2, i3); axis order is fixed as (x, y, z).
using Node = std::array<int, 3>;

/// Rectilinear box [lo, hi] sampled with n nodes per axis.
///
/// Node storage is row-major in (i1, i2, i3): the last axis is contiguous.
/// Every axis carries at least five nodes so that the fourth order stencils
/// fit in the interior.
class GridSpec {
 public:
  GridSpec();
  GridSpec(const std::array<double, 3>& lo, const std::array<double, 3>& hi,
           const std::array<int, 3>& n);

  static GridSpec cube(double lo, double hi, int n);

  const std::array<double, 3>& lo() const { return lo_; }
  const std::array<double, 3>& hi() const { return hi_; }
  const std::array<int, 3>& n() const { return n_; }
  int n(int axis) const { return n_[axis]; }

  double spacing(int axis) const { return (hi_[axis] - lo_[axis]) / (n_[axis] - 1); }
  double max_spacing() const;
  double coord(int axis, int i) const { return lo_[axis] + i * spacing(axis); }
  Eigen::Vector3d point(const Node& node) const;

  std::size_t size() const { return std::size_t(n_[0]) * n_[1] * n_[2]; }
  std::size_t stride(int axis) const;
  std::size_t index(int i, int j, int k) const {
    return (std::size_t(i) * n_[1] + j) * n_[2] + k;
  }
  std::size_t index(const Node& node) const { return index(node[0], node[1], node[2]); }
  Node node(std::size_t flat) const;
  bool contains(const Node& node) const;

  /// Node closest to a physical point (clamped to the box).
  Node nearest_node(const Eigen::Vector3d& p) const;

  bool operator==(const GridSpec&) const = default;

 private:
  std::array<double, 3> lo_;
  std::array<double, 3> hi_;
  std::array<int, 3> n_;
};

/// Real values on the nodes of a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double value = 0.0);
  ScalarField(const GridSpec& grid, Eigen::ArrayXd values);

  template <class Fn>
  static ScalarField sample(const GridSpec& grid, Fn&& fn) {
    ScalarField out(grid);
    const auto& n = grid.n();
    for (int i = 0; i < n[0]; ++i)
      for (int j = 0; j < n[1]; ++j)
        for (int k = 0; k < n[2]; ++k)
          out.values_[grid.index(i, j, k)] =
              fn(grid.coord(0, i), grid.coord(1, j), grid.coord(2, k));
    return out;
  }

  const GridSpec& grid() const { return grid_; }
  const Eigen::ArrayXd& values() const { return values_; }
  Eigen::ArrayXd& values() { return values_; }

  double operator()(int i, int j, int k) const { return values_[grid_.index(i, j, k)]; }
  double& operator()(int i, int j, int k) { return values_[grid_.index(i, j, k)]; }
  double at(const Node& node) const { return values_[grid_.index(node)]; }

  double sup_abs() const;
  bool all_finite() const;

  ScalarField operator-() const { return {grid_, -values_}; }
  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  GridSpec grid_;
  Eigen::ArrayXd values_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator+(const ScalarField& a, double s);
ScalarField operator-(const ScalarField& a, double s);
ScalarField operator*(const ScalarField& a, double s);
ScalarField operator/(const ScalarField& a, double s);
ScalarField operator+(double s, const ScalarField& a);
ScalarField operator-(double s, const ScalarField& a);
ScalarField operator*(double s, const ScalarField& a);
ScalarField operator/(double s, const ScalarField& a);

ScalarField square(const ScalarField& a);
ScalarField sqrt(const ScalarField& a);
ScalarField abs(const ScalarField& a);

/// Three scalar components on one grid.
struct VectorField {
  std::array<ScalarField, 3> c;

  VectorField() = default;
  explicit VectorField(const GridSpec& grid) : c{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}
  VectorField(ScalarField x, ScalarField y, ScalarField z) : c{std::move(x), std::move(y), std::move(z)} {}

  template <class Fn>
  static VectorField sample(const GridSpec& grid, Fn&& fn) {
    VectorField out(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const Eigen::Vector3d v = fn(grid.point(grid.node(p)));
      for (int a = 0; a < 3; ++a) out.c[a].values()[p] = v[a];
    }
    return out;
  }

  const GridSpec& grid() const { return c[0].grid(); }
  ScalarField& operator[](int a) { return c[a]; }
  const ScalarField& operator[](int a) const { return c[a]; }
  Eigen::Vector3d at(const Node& node) const;
  Eigen::Vector3d at(std::size_t flat) const;
  double sup_norm() const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const ScalarField& s, const VectorField& v);
VectorField operator*(double s, const VectorField& v);
ScalarField dot(const VectorField& a, const VectorField& b);
VectorField cross(const VectorField& a, const VectorField& b);
ScalarField norm2(const VectorField& a);

/// The 1-form g1 dx + g2 dy + g3 dz.
struct OneForm {
  std::array<ScalarField, 3> g;
  const GridSpec& grid() const { return g[0].grid(); }
};

/// Finite difference derivative along `axis` (0, 1, 2).
///
/// Order 2: central differences inside, three-point one-sided stencils on the
/// two boundary layers. Order 4: five-point central differences where they
/// fit, five-point biased stencils on the two outer layers.
ScalarField partial_derivative(const ScalarField& field, int axis, int order = 2);

/// Compact three-point (order 2) or five-point (order 4) second difference
/// along `axis`, with one-sided stencils of the same order on the boundary.
ScalarField second_partial_derivative(const ScalarField& field, int axis, int order = 2);

/// Trapezoid accumulation of a closed 1-form from `base`: first along the x
/// line through the base node, then y lines, then z lines.
ScalarField integrate_oneform(const OneForm& form, const Node& base, double base_value);

/// Same accumulation with the axes swept in the given order.
ScalarField integrate_oneform(const OneForm& form, const Node& base, double base_value,
                              const std::array<int, 3>& sweep);

/// CSV dump with header `i,j,k,x,y,z,value`.
void write_csv(std::ostream& os, const ScalarField& field);

namespace detail {

/// In-place stencil kernel shared by the 3-D and 2-D field types.
void differentiate_line(const double* in, std::ptrdiff_t in_stride, int n, double h, int order,
                        double* out, std::ptrdiff_t out_stride);

void second_difference_line(const double* in, std::ptrdiff_t in_stride, int n, double h, int order,
                            double* out, std::ptrdiff_t out_stride);

/// Trapezoid running integral along a line, anchored at position `base`.
void integrate_line(const double* g, std::ptrdiff_t stride, int n, double h, int base,
                    double base_value, double* out);

void require_same_grid(const GridSpec& a, const GridSpec& b);

}  // namespace detail

}  // namespace orthonet
