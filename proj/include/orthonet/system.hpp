#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "orthonet/grid.hpp"
#include "orthonet/residual.hpp"

namespace orthonet {

/// Minkowski signature of the trace condition: eps1 H1^2 + eps2 H2^2 + eps3 H3^2.
inline constexpr std::array<double, 3> kEpsilon{1.0, 1.0, -1.0};

/// beta[i][j] = (1/H_i) d_i H_j; diagonal entries are kept at zero.
using BetaFields = std::array<std::array<ScalarField, 3>, 3>;

/// A triply orthogonal system sampled on a grid.
///
/// The Lame coefficients are signed: transforms may flip or zero them. `N[i]`
/// is the unit normal of the coordinate surfaces x_i = const, so that
/// d_i f = H_i N_i. Every transform returns a fresh value; nothing mutates a
/// system after it has been assembled.
struct OrthogonalSystem {
  VectorField f;
  std::array<ScalarField, 3> H;
  std::array<VectorField, 3> N;
  BetaFields beta;
  std::string provenance;
  bool degenerate = false;          ///< some H_i vanishes somewhere
  std::optional<Node> anchor;       ///< node where f was pinned by integration
  std::vector<ResidualReport> diagnostics;

  const GridSpec& grid() const { return f.grid(); }
};

/// Second derivative d_i d_j by repeated first differences.
ScalarField second_derivative(const ScalarField& field, int i, int j, int order = 2);

/// d_i ln H_j expressed through the rotational coefficients: beta_ij H_i / H_j.
ScalarField dlog_lame(const OrthogonalSystem& sys, int i, int j);

/// Rotational coefficients from Lame coefficients by finite differences.
/// Throws DegenerateNode where |H_i| falls below `threshold`.
BetaFields rotational_coefficients(const std::array<ScalarField, 3>& H, int order = 2,
                                   double threshold = 1e-12);

/// H_i = |d_i f|, N_i = d_i f / H_i, beta from the H fields. The result carries
/// an orthogonality report in `diagnostics` (a warning, never an exception).
/// Throws DegenerateNode where det(d_x f, d_y f, d_z f) vanishes.
OrthogonalSystem build_from_parametrization(const VectorField& f, const CheckOptions& opts = {},
                                            std::string provenance = "parametrization");

/// Assemble a system from its parts without further differentiation.
OrthogonalSystem assemble_system(VectorField f, std::array<ScalarField, 3> H, std::array<VectorField, 3> N,
                                 BetaFields beta, std::string provenance);

/// Whether any H_i falls below `threshold` (relative to sup |H|).
bool has_vanishing_lame(const std::array<ScalarField, 3>& H, double threshold = 1e-10);

/// Lame's first and second systems, in that order.
std::pair<ResidualReport, ResidualReport> check_lame(const std::array<ScalarField, 3>& H,
                                                     const CheckOptions& opts = {});
std::pair<ResidualReport, ResidualReport> check_lame(const OrthogonalSystem& sys, const CheckOptions& opts = {});

/// (d_i f, d_j f) = 0 for the finite difference tangents.
ResidualReport check_orthogonality(const OrthogonalSystem& sys, const CheckOptions& opts = {});

/// d_i f - H_i N_i.
ResidualReport check_metric(const OrthogonalSystem& sys, const CheckOptions& opts = {});

/// (N_i, N_j) - delta_ij, pointwise.
ResidualReport check_frame_orthonormality(const OrthogonalSystem& sys, const CheckOptions& opts = {});

/// d_j N_i - beta_ij N_j and d_i N_i + beta_ji N_j + beta_ki N_k.
std::pair<ResidualReport, ResidualReport> check_frame_system(const OrthogonalSystem& sys,
                                                             const CheckOptions& opts = {});

/// H_i beta_ij - d_i H_j: the stored rotational coefficients against the stored
/// Lame coefficients, written without division so zero H_i are harmless.
ResidualReport check_beta_consistency(const OrthogonalSystem& sys, const CheckOptions& opts = {});
ResidualReport check_beta_consistency(const std::array<ScalarField, 3>& H, const BetaFields& beta,
                                      const CheckOptions& opts = {});

/// det(d_x f, d_y f, d_z f) - det(N) H1 H2 H3.
ResidualReport check_determinant(const OrthogonalSystem& sys, const CheckOptions& opts = {});

/// Point equation of the family x_k = const (i != j):
/// d_ij f = d_j ln H_i d_i f + d_i ln H_j d_j f.
ResidualReport check_point_equation(const OrthogonalSystem& sys, int i, int j, const CheckOptions& opts = {});

/// Same equation for a scalar candidate solution theta.
ResidualReport check_point_equation(const OrthogonalSystem& sys, int i, int j, const ScalarField& theta,
                                    const CheckOptions& opts = {});

/// det(N1, N2, N3) per node.
ScalarField orientation(const OrthogonalSystem& sys);

/// H1^2 + H2^2 - H3^2.
ScalarField chi_trace(const std::array<ScalarField, 3>& H);
ScalarField chi_trace(const OrthogonalSystem& sys);

enum class ChiKind { Guichard, ConstantTrace, SphereTrace, Other };

struct ChiClassification {
  ChiKind kind = ChiKind::Other;
  double constant = 0.0;   ///< chi for constant-trace systems, alpha^2 for sphere-trace ones
  double spread = 0.0;     ///< half the range of the fitted quantity
  double tolerance = 0.0;
};

/// Classify the trace as Guichard (chi = 0), constant chi, chi = alpha^2 |f|^2, or other.
ChiClassification classify_chi(const OrthogonalSystem& sys, const CheckOptions& opts = {});
std::string to_string(ChiKind kind);

/// Inversion in the unit sphere: f' = f/|f|^2, H' = H/|f|^2, N' the reflected
/// frame, beta'_ij = beta_ij - 2 H_j (f.N_i)/|f|^2. Throws DegenerateNode where
/// |f|^2 < threshold.
OrthogonalSystem invert_system(const OrthogonalSystem& sys, double threshold = 1e-12);

struct FrameIntegration {
  OrthogonalSystem system;
  ResidualReport path_dependence;   ///< x,y,z sweep against z,y,x sweep
  ResidualReport frame_drift;       ///< orthonormality defect before projection
};

/// Recover a parametrization from Lame coefficients: propagate the frame along
/// lattice lines with RK4 (re-orthonormalised after each step), then integrate
/// df = sum H_i N_i dx_i. `seed` holds N_1, N_2, N_3 as rows and must be a
/// right-handed orthonormal matrix.
FrameIntegration integrate_frame(const std::array<ScalarField, 3>& H, const Eigen::Matrix3d& seed,
                                 const Node& base, const Eigen::Vector3d& base_point = Eigen::Vector3d::Zero(),
                                 const CheckOptions& opts = {});

/// |d_i f| of `sys` against |H_i|: comparison up to Euclidean motions.
ResidualReport compare_metric(const OrthogonalSystem& sys, const std::array<ScalarField, 3>& H,
                              const CheckOptions& opts = {});

/// ASCII OBJ of the coordinate surface x_axis = coord(index): `v` lines over the
/// slice lattice, then two `f` triangles per lattice cell.
void write_slice_obj(std::ostream& os, const VectorField& f, int axis, int index);

}  // namespace orthonet
