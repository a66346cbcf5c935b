#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "orthonet/combescure.hpp"
#include "orthonet/residual.hpp"
#include "orthonet/system.hpp"

namespace orthonet {

/// Algebraic trace eps_i H_i^2 and its differentiated form
/// eps_i d_i H_i + eps_j H_j beta_ij + eps_k H_k beta_ik, in that order.
std::pair<ResidualReport, ResidualReport> check_guichard(const OrthogonalSystem& sys, const CheckOptions& opts = {});

/// Multipliers of the associated systems, h_i,c = h_i + c.
struct AssociatedFamily {
  CombescureTriple base;   ///< the member at c = 0
  Node anchor{};           ///< node where h_3 was pinned
  std::string seed;        ///< provenance of the Guichard net

  CombescureTriple at(double c) const;
};

struct AssociatedSystem {
  AssociatedFamily family;
  OrthogonalSystem system;
  std::vector<ResidualReport> reports;
};

/// Gradient of h_3: -(H_2/H_3) k_13, (H_1/H_3) k_23, -(H_1 H_2/H_3^2)(k_31 - k_32),
/// with principal curvatures k_ij = -beta_ij / H_j.
OneForm associated_gradient(const OrthogonalSystem& sys);

/// h_3 integrated from h_3(base_node) = h3_base, then h_1 = h_3 + H_2/(H_1 H_3)
/// and h_2 = h_3 - H_1/(H_2 H_3). The returned system is the member c of the
/// family, anchored at base_node with f^(base_node) = base_point. Throws
/// CheckFailed if the seed fails the Guichard trace or the gradient is not closed.
AssociatedSystem build_associated(const OrthogonalSystem& sys, double c, const Node& base_node = {0, 0, 0},
                                  double h3_base = 0.0, const Eigen::Vector3d& base_point = Eigen::Vector3d::Zero(),
                                  const CheckOptions& opts = {});

/// H_i H^_j - H_j H^_i - eps_k H_k for cyclic (i, j, k). Throws CheckFailed
/// when the two systems do not share their rotational coefficients.
ResidualReport check_characterization(const OrthogonalSystem& sys, const OrthogonalSystem& comb,
                                      const CheckOptions& opts = {});

/// h*_i = -(h_i + c)^2 + eps_i / H_i^2.
CombescureTriple dual_triple(const OrthogonalSystem& sys, const AssociatedFamily& family, double c);

/// The dual system at parameter c, integrated from f*(base_node) = base_point.
OrthogonalSystem build_dual(const OrthogonalSystem& sys, const AssociatedFamily& family, double c,
                            const Node& base_node = {0, 0, 0},
                            const Eigen::Vector3d& base_point = Eigen::Vector3d::Zero(),
                            const CheckOptions& opts = {});

/// f*_c = f*_0 - 2c f^_0 - c^2 f with every term pinned at the anchor of dual0.
/// Throws std::invalid_argument when dual0 carries no anchor or its Lame
/// coefficients are not those of the family at c = 0.
OrthogonalSystem dual_at_parameter(const OrthogonalSystem& seed, const AssociatedFamily& family,
                                   const OrthogonalSystem& dual0, double c);

/// H_i H*_j + H_j H*_i + 2 H^_i H^_j for i < j.
ResidualReport check_gsystem_relation(const OrthogonalSystem& sys, const OrthogonalSystem& assoc,
                                      const OrthogonalSystem& dual, const CheckOptions& opts = {});

/// max |beta_a - beta_b| against the default tolerance scaled by sup |beta_a|.
ResidualReport check_shared_beta(const OrthogonalSystem& a, const OrthogonalSystem& b, const CheckOptions& opts = {});

}  // namespace orthonet
