#include "orthonet/guichard.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "format.hpp"

namespace orthonet {

namespace {

double sup_of(std::initializer_list<const ScalarField*> fields, int collar) {
  double s = 0.0;
  for (const auto* f : fields) s = std::max(s, sup_over(std::span(f, 1), collar));
  return s;
}

ScalarField kappa(const OrthogonalSystem& s, int i, int j) { return -s.beta[i][j] / s.H[j]; }

}  // namespace

std::pair<ResidualReport, ResidualReport> check_guichard(const OrthogonalSystem& sys, const CheckOptions& opts) {
  const ScalarField trace = chi_trace(sys);
  double scale = 0.0;
  for (const auto& h : sys.H) {
    const ScalarField h2 = square(h);
    scale = std::max(scale, sup_over(std::span(&h2, 1), opts.collar));
  }
  auto algebraic = summarize("guichard_trace", std::span(&trace, 1), scale, opts);

  std::vector<ScalarField> res;
  double dscale = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const ScalarField a = kEpsilon[i] * partial_derivative(sys.H[i], i, opts.order);
    const ScalarField b = kEpsilon[j] * sys.H[j] * sys.beta[i][j];
    const ScalarField d = kEpsilon[k] * sys.H[k] * sys.beta[i][k];
    res.push_back(a + b + d);
    dscale = std::max(dscale, sup_of({&a, &b, &d}, opts.collar));
  }
  return {algebraic, summarize("guichard_differentiated", res, dscale, opts)};
}

CombescureTriple AssociatedFamily::at(double c) const {
  return {{base.h[0] + c, base.h[1] + c, base.h[2] + c}};
}

OneForm associated_gradient(const OrthogonalSystem& s) {
  const auto& H = s.H;
  return {{-(H[1] / H[2]) * kappa(s, 0, 2), (H[0] / H[2]) * kappa(s, 1, 2),
           -(H[0] * H[1] / square(H[2])) * (kappa(s, 2, 0) - kappa(s, 2, 1))}};
}

AssociatedSystem build_associated(const OrthogonalSystem& sys, double c, const Node& base_node, double h3_base,
                                  const Eigen::Vector3d& base_point, const CheckOptions& opts) {
  const auto [trace, differentiated] = check_guichard(sys, opts);
  if (!trace.pass) throw CheckFailed(trace);
  const OneForm grad = associated_gradient(sys);
  auto closed = closedness_residual(grad, integrability_guard(opts));
  closed.name = "associated_closedness";
  if (!closed.pass) throw CheckFailed(closed);

  const auto& H = sys.H;
  const ScalarField h3 = integrate_oneform(grad, base_node, h3_base);
  AssociatedFamily family{{{h3 + H[1] / (H[0] * H[2]), h3 - H[0] / (H[1] * H[2]), h3}}, base_node, sys.provenance};
  auto assoc = apply_combescure(sys, family.at(c), base_node, base_point, opts);
  assoc.provenance = "associated(" + sys.provenance + ", c=" + detail::format_number(c) + ")";

  std::vector<ResidualReport> reports{trace, differentiated, closed, check_combescure(sys, family.at(c), opts)};
  const ScalarField one = chi_trace(assoc) - 1.0;
  double scale = 0.0;
  for (const auto& h : assoc.H) {
    const ScalarField h2 = square(h);
    scale = std::max(scale, sup_over(std::span(&h2, 1), opts.collar));
  }
  reports.push_back(summarize("associated_trace", std::span(&one, 1), scale, opts));
  return {std::move(family), std::move(assoc), std::move(reports)};
}

ResidualReport check_shared_beta(const OrthogonalSystem& a, const OrthogonalSystem& b, const CheckOptions& opts) {
  detail::require_same_grid(a.grid(), b.grid());
  std::vector<ScalarField> res;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        res.push_back(a.beta[i][j] - b.beta[i][j]);
        scale = std::max(scale, sup_over(std::span(&a.beta[i][j], 1), opts.collar));
      }
  return summarize("shared_beta", res, scale, opts);
}

ResidualReport check_characterization(const OrthogonalSystem& sys, const OrthogonalSystem& comb,
                                      const CheckOptions& opts) {
  const auto shared = check_shared_beta(sys, comb, opts);
  if (!shared.pass) throw CheckFailed(shared);
  std::vector<ScalarField> res;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const ScalarField a = sys.H[i] * comb.H[j];
    const ScalarField b = sys.H[j] * comb.H[i];
    const ScalarField d = kEpsilon[k] * sys.H[k];
    res.push_back(a - b - d);
    scale = std::max(scale, sup_of({&a, &b, &d}, opts.collar));
  }
  return summarize("characterization", res, scale, opts);
}

CombescureTriple dual_triple(const OrthogonalSystem& sys, const AssociatedFamily& family, double c) {
  CombescureTriple t;
  for (int i = 0; i < 3; ++i) t.h[i] = kEpsilon[i] / square(sys.H[i]) - square(family.base.h[i] + c);
  return t;
}

OrthogonalSystem build_dual(const OrthogonalSystem& sys, const AssociatedFamily& family, double c,
                            const Node& base_node, const Eigen::Vector3d& base_point, const CheckOptions& opts) {
  auto dual = apply_combescure(sys, dual_triple(sys, family, c), base_node, base_point, opts);
  dual.provenance = "dual(" + sys.provenance + ", c=" + detail::format_number(c) + ")";
  return dual;
}

OrthogonalSystem dual_at_parameter(const OrthogonalSystem& seed, const AssociatedFamily& family,
                                   const OrthogonalSystem& dual0, double c) {
  if (!dual0.anchor) throw std::invalid_argument("dual system carries no anchor");
  const Node anchor = *dual0.anchor;
  const auto expected = dual_triple(seed, family, 0.0);
  for (int i = 0; i < 3; ++i) {
    const ScalarField d = dual0.H[i] - expected.h[i] * seed.H[i];
    if (d.sup_abs() > 1e-10 * std::max(1.0, dual0.H[i].sup_abs()))
      throw std::invalid_argument("dual system does not belong to this associated family");
  }
  // f^_0 and f are integrated from zero at the anchor, like every other member
  // of the family, so that f*_c(anchor) = f*_0(anchor).
  const auto assoc0 = apply_combescure(seed, family.at(0.0), anchor);
  const auto unit = apply_combescure(seed, constant_triple(seed.grid(), 1.0), anchor);
  VectorField f(seed.grid());
  for (int k = 0; k < 3; ++k) f.c[k] = dual0.f.c[k] - 2.0 * c * assoc0.f.c[k] - c * c * unit.f.c[k];
  std::array<ScalarField, 3> H;
  for (int i = 0; i < 3; ++i) H[i] = dual0.H[i] - 2.0 * c * assoc0.H[i] - c * c * seed.H[i];
  auto out = assemble_system(std::move(f), std::move(H), dual0.N, dual0.beta,
                             "dual(" + seed.provenance + ", c=" + detail::format_number(c) + ")");
  out.anchor = anchor;
  return out;
}

ResidualReport check_gsystem_relation(const OrthogonalSystem& sys, const OrthogonalSystem& assoc,
                                      const OrthogonalSystem& dual, const CheckOptions& opts) {
  for (const auto* other : {&assoc, &dual}) {
    const auto shared = check_shared_beta(sys, *other, opts);
    if (!shared.pass) throw CheckFailed(shared);
  }
  std::vector<ScalarField> res;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const ScalarField a = sys.H[i] * dual.H[j];
      const ScalarField b = sys.H[j] * dual.H[i];
      const ScalarField d = 2.0 * assoc.H[i] * assoc.H[j];
      res.push_back(a + b + d);
      scale = std::max(scale, sup_of({&a, &b, &d}, opts.collar));
    }
  return summarize("gsystem_relation", res, scale, opts);
}

}  // namespace orthonet
