#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "orthonet/residual.hpp"
#include "orthonet/system.hpp"

namespace orthonet {

/// Ribaucour transform data: the sphere congruence through f is described by
/// gamma_i and phi with d_i gamma_j = beta_ji gamma_i and d_i phi = H_i gamma_i.
struct RibaucourData {
  std::array<ScalarField, 3> gamma;
  ScalarField phi;

  ScalarField A() const;   ///< gamma_1^2 + gamma_2^2 + gamma_3^2
};

/// theta_i = d_i gamma_i + beta_ji gamma_j + beta_ki gamma_k.
std::array<ScalarField, 3> ribaucour_theta(const OrthogonalSystem& sys, const RibaucourData& data, int order = 2);

/// Radii R_i = -phi/gamma_i of the enveloped sphere congruences; NaN where
/// |gamma_i| < threshold.
std::array<ScalarField, 3> sphere_radii(const RibaucourData& data, double threshold = 1e-12);

/// The gamma equations and the phi equations, in that order.
std::pair<ResidualReport, ResidualReport> check_ribaucour_data(const OrthogonalSystem& sys, const RibaucourData& data,
                                                               const CheckOptions& opts = {});

/// f' = f - (2 phi/A) sum gamma_i N_i, H'_i = H_i - 2 phi theta_i/A,
/// beta'_ij = beta_ij - 2 gamma_i theta_j/A, and N'_i the reflection of N_i in
/// the plane orthogonal to sum gamma_i N_i. Throws CheckFailed when the data
/// fail their equations and DegenerateNode where A < threshold * sup A.
OrthogonalSystem apply_ribaucour(const OrthogonalSystem& sys, const RibaucourData& data, const CheckOptions& opts = {},
                                 double threshold = 1e-6);

struct RibaucourDecomposition {
  OrthogonalSystem fbar;            ///< sum gamma_i N_i with Lame coefficients theta_i
  OrthogonalSystem fbar_inverted;   ///< fbar/|fbar|^2
  VectorField reconstruction;       ///< f - 2 phi fbar/|fbar|^2
  std::vector<ResidualReport> reports;   ///< fbar metric, final Combescure relation
};

/// Combescure transform to fbar, inversion, Combescure transform back. The
/// final relation is (theta_j/A) beta'_ji - d_j(theta_i/A) with the beta' of
/// apply_ribaucour.
RibaucourDecomposition decompose_ribaucour(const OrthogonalSystem& sys, const RibaucourData& data,
                                           const CheckOptions& opts = {}, double threshold = 1e-6);

/// gamma_i = fbar.N_i and phi from d_i phi = H_i gamma_i, pinned at
/// phi(base) = f.fbar/2 + lambda so that fbar = f gives phi = |f|^2/2 + lambda.
/// Throws CheckFailed when the two systems do not share their rotational
/// coefficients or the phi gradient is not closed.
RibaucourData induce_ribaucour_family(const OrthogonalSystem& sys, const OrthogonalSystem& comb, double lambda,
                                      const Node& base = {0, 0, 0}, const CheckOptions& opts = {});

/// Bianchi's data: d_j gamma_i = beta_ij gamma_j, d_j gammabar_i = beta_ji gammabar_j,
/// theta_i = alpha gammabar_i, eps_i d_i gammabar_i + eps_j beta_ij gammabar_j
/// + eps_k beta_ik gammabar_k = alpha gamma_i.
struct BianchiData {
  std::array<ScalarField, 3> gamma;
  std::array<ScalarField, 3> gammabar;
  double alpha = 1.0;

  ScalarField A() const;      ///< gamma_1^2 + gamma_2^2 + gamma_3^2
  ScalarField Abar() const;   ///< gammabar_1^2 + gammabar_2^2 - gammabar_3^2
};

struct BianchiIntegration {
  BianchiData data;
  OrthogonalSystem fbar;   ///< sum gamma_i N_i with Lame coefficients alpha gammabar_i
  ResidualReport path_dependence;
  ResidualReport constraint;   ///< A - Abar
  ResidualReport trace;        ///< theta_1^2 + theta_2^2 - theta_3^2 - alpha^2 |fbar|^2
  ResidualReport metric;       ///< d_i fbar - theta_i N_i
};

/// March the six-component linear system along lattice lines with RK4
/// (x lines, then y, then z from the base node) and compare with the z, y, x
/// sweep. The seed must satisfy A = Abar > 0; the system must be a Guichard net.
BianchiIntegration integrate_bianchi(const OrthogonalSystem& sys, double alpha, const Eigen::Vector3d& gamma0,
                                     const Eigen::Vector3d& gammabar0, const Node& base = {0, 0, 0},
                                     const CheckOptions& opts = {});

/// (1/alpha^2)(H_1 Hbar_1 + H_2 Hbar_2 - H_3 Hbar_3).
ScalarField backlund_phi(const std::array<ScalarField, 3>& H, const OrthogonalSystem& fbar, double alpha);

/// R(f) = f - (2 phi_lambda/|fbar|^2) fbar with phi_lambda = backlund_phi + lambda.
/// Throws CheckFailed when fbar is not Combescure related to the seed or fails
/// the trace condition theta_1^2 + theta_2^2 - theta_3^2 = alpha^2 |fbar|^2.
OrthogonalSystem backlund(const OrthogonalSystem& sys, const OrthogonalSystem& fbar, double alpha, double lambda,
                          const CheckOptions& opts = {});

/// trace(R(f)) against 4 alpha^2 lambda phi_lambda/|fbar|^2, relative to max(1, |expected|).
ResidualReport check_backlund_trace(const OrthogonalSystem& result, const OrthogonalSystem& sys,
                                    const OrthogonalSystem& fbar, double alpha, double lambda,
                                    double tolerance = 1e-10);

/// Same transform with lambda = 0 for a seed of constant trace. Throws
/// std::invalid_argument for a seed with a vanishing Lame coefficient or a
/// non-constant trace.
OrthogonalSystem backlund_lambda_system(const OrthogonalSystem& sys, const OrthogonalSystem& fbar, double alpha,
                                        const CheckOptions& opts = {});

struct PermutabilityResult {
  OrthogonalSystem transformed, transformed_assoc, transformed_dual;
  std::vector<ResidualReport> reports;
};

/// Transform a Guichard net, its associated system and its dual with one
/// alpha^2 |fbar|^2 system and check that the results again form such a
/// triple: the two phi relations, the G-system relation of the transforms and
/// their shared rotational coefficients. Throws CheckFailed on a failed
/// precondition.
PermutabilityResult check_permutability(const OrthogonalSystem& sys, const OrthogonalSystem& assoc,
                                        const OrthogonalSystem& dual, const OrthogonalSystem& fbar, double alpha,
                                        const CheckOptions& opts = {});

}  // namespace orthonet
