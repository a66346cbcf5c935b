#pragma once

#include <array>
#include <vector>

#include "orthonet/residual.hpp"
#include "orthonet/system.hpp"

namespace orthonet {

/// Multipliers h_i of a Combescure transform: d f^ = sum h_i d_i f dx_i.
struct CombescureTriple {
  std::array<ScalarField, 3> h;
};

/// Functions phi_i inducing a Combescure triple through h_i - h_j = phi_k.
struct PhiTriple {
  std::array<ScalarField, 3> phi;
};

CombescureTriple constant_triple(const GridSpec& grid, double lambda);

/// d_i h_j - (h_i - h_j) d_i ln H_j over the six pairs i != j.
ResidualReport check_combescure(const OrthogonalSystem& sys, const CombescureTriple& triple,
                                const CheckOptions& opts = {});

/// Integrate f^ from f^(base_node) = base_point; H^_i = h_i H_i, frame and
/// rotational coefficients are copied. Throws CheckFailed when the integrand
/// is not closed.
OrthogonalSystem apply_combescure(const OrthogonalSystem& sys, const CombescureTriple& triple,
                                  const Node& base_node = {0, 0, 0},
                                  const Eigen::Vector3d& base_point = Eigen::Vector3d::Zero(),
                                  const CheckOptions& opts = {});

/// The pair of invariants of a phi-triple: phi_1 + phi_2 + phi_3 = 0 and, for
/// cyclic (i, j, k), d_j phi_j = phi_i d_j ln H_k + phi_k d_j ln H_i.
std::pair<ResidualReport, ResidualReport> check_phi_triple(const OrthogonalSystem& sys, const PhiTriple& phis,
                                                           const CheckOptions& opts = {});

/// phi_3 = H_3/(H_1 H_2), phi_2 = -H_2/(H_1 H_3), phi_1 = -H_1/(H_2 H_3).
PhiTriple guichard_phi_triple(const OrthogonalSystem& sys);

struct PhiIntegration {
  CombescureTriple triple;
  std::vector<ResidualReport> reports;   ///< closedness per h_j, then h_i - h_j - phi_k
};

/// Integrate the gradient system of each h_j; the base values are chosen so
/// that h_3(base) = c. Throws CheckFailed on a violated invariant or a
/// non-closed gradient.
PhiIntegration phi_triple_to_combescure(const OrthogonalSystem& sys, const PhiTriple& phis, double c,
                                        const Node& base_node = {0, 0, 0}, const CheckOptions& opts = {});

}  // namespace orthonet
