#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "orthonet/residual.hpp"
#include "orthonet/system.hpp"

namespace orthonet {

/// 2-D values on a coordinate surface: rows follow the first in-surface axis
/// (u), columns the second (v).
using SliceField = Eigen::ArrayXXd;

/// Lattice of the coordinate surface x_axis = coord(index). The in-surface
/// axes are the two remaining axes in increasing order.
struct SliceGrid {
  GridSpec parent;
  int axis = 2;
  int index = 0;
  std::array<int, 2> axes{0, 1};

  int n(int dir) const { return parent.n(axes[dir]); }
  double spacing(int dir) const { return parent.spacing(axes[dir]); }
  double coord(int dir, int i) const { return parent.coord(axes[dir], i); }
  Node node(int a, int b) const;
};

/// Restriction of a 3-D field to the slice.
SliceField restrict_field(const ScalarField& field, const SliceGrid& grid);

/// Finite difference derivative along dir 0 (u) or 1 (v), same stencils as the 3-D fields.
SliceField slice_derivative(const SliceField& field, const SliceGrid& grid, int dir, int order = 2);

/// Residual summary over the slice, collar applied along both in-surface axes.
/// Worst nodes are reported as parent lattice nodes.
ResidualReport summarize_slice(std::string name, const std::vector<SliceField>& residuals, double scale,
                               const SliceGrid& grid, const CheckOptions& opts,
                               const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>* mask = nullptr);

/// Coordinate surface x_axis = const with its induced metric H1^2 du^2 + H2^2 dv^2
/// and principal curvatures k1 = k_{axis,u}, k2 = k_{axis,v}.
struct SurfaceSlice {
  SliceGrid grid;
  std::array<SliceField, 3> f;
  SliceField H1, H2;
  std::array<SliceField, 3> normal;
  SliceField kappa1, kappa2;
  bool umbilic = false;      ///< k1 = k2 within tolerance on the whole slice
  double umbilic_defect = 0.0;
};

SurfaceSlice extract_slice(const OrthogonalSystem& sys, int axis, int index, const CheckOptions& opts = {});

/// Sign of the trace term of the slice: +1 on z-slices, -1 on x- and y-slices.
double slice_epsilon(int axis);

/// d_uv theta - d_v ln H1 d_u theta - d_u ln H2 d_v theta.
ResidualReport check_surface_point_solution(const SurfaceSlice& slice, const SliceField& theta,
                                            const CheckOptions& opts = {});

/// Multipliers of a Combescure transform of a surface: df^ = h f_u du + l f_v dv.
struct SurfaceCombescurePair {
  SliceField h, l;

  SliceField delta() const;                                     ///< sign of h l
  SliceField kappa1_hat(const SurfaceSlice& s) const;           ///< delta k1 / h
  SliceField kappa2_hat(const SurfaceSlice& s) const;           ///< delta k2 / l
};

/// Restriction of a 3-D Combescure triple to the in-surface multipliers.
SurfaceCombescurePair restrict_pair(const std::array<ScalarField, 3>& triple, const SliceGrid& grid);

/// d_v h - (l - h) d_v ln H1 and d_u l - (h - l) d_u ln H2.
ResidualReport check_pair_compatibility(const SurfaceSlice& slice, const SurfaceCombescurePair& pair,
                                        const CheckOptions& opts = {});

struct GReport {
  double epsilon = 1.0;
  double c = 1.0;
  ResidualReport fixed;                       ///< c H1^2 H2^2 (h - l)^2 - (H2^2 + eps H1^2)
  std::optional<ResidualReport> reparametrized;
  std::optional<Eigen::ArrayXd> chi1, chi2;   ///< only when the fitted 1/chi^2 are positive
  bool nontrivial = false;                    ///< h - l does not vanish identically
};

/// G-surface condition, in terms of h - l so that zeros of h or l are harmless.
/// With `fit`, also the best separable reparametrisation
/// c (h - l)^2 = a(u)/H1^2 + eps b(v)/H2^2, a = 1/chi1^2, b = 1/chi2^2.
GReport check_G_condition(const SurfaceSlice& slice, const SurfaceCombescurePair& pair, double epsilon, double c,
                          bool fit = false, const CheckOptions& opts = {});

/// (h*, l*) = delta~ (-h^2 + 1/H1^2, -l^2 + eps/H2^2). Throws CheckFailed when the
/// pair fails the G-condition with c = 1.
SurfaceCombescurePair surface_dual(const SurfaceSlice& slice, const SurfaceCombescurePair& pair, double epsilon,
                                   double delta_tilde = 1.0, const CheckOptions& opts = {});

struct DualRelationReport {
  ResidualReport relation;   ///< h* + l* + 2 h l
  bool nontrivial_u = false;  ///< h* != -h^2 somewhere
  bool nontrivial_v = false;  ///< l* != -l^2 somewhere
};

/// h'l'' + l'h'' + 2 = 0 with the multipliers f -> f^ (h', l') and f^ -> f*
/// (h'', l''), multiplied through by h l.
DualRelationReport check_dual_relation(const SurfaceSlice& slice, const SurfaceCombescurePair& pair,
                                       const SurfaceCombescurePair& star, const CheckOptions& opts = {});

struct DemoulinReport {
  ResidualReport lemma;
  SliceField omega;          ///< l k1 - h k2
  bool demoulin = false;     ///< omega vanishes on the mask
  bool degenerate = false;   ///< nothing left after masking umbilic and flat points
};

/// (1/k1 - 1/k2)(1/k1* - 1/k2*) - 1/(k1^2 H1^2) - eps/(k2^2 H2^2) + (1/k^1 - 1/k^2)^2,
/// multiplied through by k1^2 k2^2, on nodes where k1, k2 and k1 - k2 are bounded
/// away from zero.
DemoulinReport check_demoulin(const SurfaceSlice& slice, const SurfaceCombescurePair& pair,
                              const SurfaceCombescurePair& star, double epsilon, const CheckOptions& opts = {});

struct EisenhartPair {
  SurfaceCombescurePair pair;
  std::vector<ResidualReport> reports;   ///< phi equation, closedness
};

/// d_u h = phi d_u ln(H2 phi), d_v h = -phi d_v ln H1, l = h - phi, with
/// h(base) = constant. Throws CheckFailed when phi does not solve
/// d_uv phi + d_v ln H1 d_u phi + d_u ln H2 d_v phi + phi d_uv ln(H1 H2) = 0.
EisenhartPair eisenhart_pair_from_phi(const SurfaceSlice& slice, const SliceField& phi, double constant,
                                      std::array<int, 2> base = {0, 0}, const CheckOptions& opts = {});

/// Coordinate family x_axis = const. The curvatures of the coordinate curves
/// along x_axis are k_j,axis and k_k,axis.
struct FamilyAnalysis {
  int axis = 0;
  bool parallel = false;
  bool totally_umbilic = false;
  bool cyclic = false;
  ResidualReport parallel_report;   ///< beta_j,axis and beta_k,axis
  ResidualReport umbilic_report;    ///< k_axis,j - k_axis,k
  ResidualReport cyclic_report;     ///< d_axis k_j,axis and d_axis k_k,axis
  ResidualReport torsion_report;
  ScalarField torsion;              ///< NaN where both curvatures vanish
};

/// Torsion (k_ji d_i k_ki - k_ki d_i k_ji)/(k_ji^2 + k_ki^2) for the curves along x_i;
/// cyclic means d_i k_ji = d_i k_ki = 0.
FamilyAnalysis analyze_family(const OrthogonalSystem& sys, int axis, const CheckOptions& opts = {});

/// d_u k1 and d_v k2: each principal curvature constant along its own curvature line.
ResidualReport check_dupin(const SurfaceSlice& slice, const CheckOptions& opts = {});

}  // namespace orthonet
