#include "orthonet/combescure.hpp"

#include <algorithm>
#include <string>

namespace orthonet {

namespace {

double sup_of(std::initializer_list<const ScalarField*> fields, int collar) {
  double s = 0.0;
  for (const auto* f : fields) s = std::max(s, sup_over(std::span(f, 1), collar));
  return s;
}

}  // namespace

CombescureTriple constant_triple(const GridSpec& grid, double lambda) {
  return {{ScalarField(grid, lambda), ScalarField(grid, lambda), ScalarField(grid, lambda)}};
}

ResidualReport check_combescure(const OrthogonalSystem& sys, const CombescureTriple& t, const CheckOptions& opts) {
  std::vector<ScalarField> res;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const ScalarField a = partial_derivative(t.h[j], i, opts.order);
      const ScalarField b = (t.h[i] - t.h[j]) * dlog_lame(sys, i, j);
      res.push_back(a - b);
      scale = std::max(scale, sup_of({&a, &b}, opts.collar));
    }
  return summarize("combescure", res, scale, opts);
}

OrthogonalSystem apply_combescure(const OrthogonalSystem& sys, const CombescureTriple& t, const Node& base_node,
                                  const Eigen::Vector3d& base_point, const CheckOptions& opts) {
  const GridSpec& g = sys.grid();
  std::array<ScalarField, 3> H;
  for (int i = 0; i < 3; ++i) H[i] = t.h[i] * sys.H[i];
  VectorField f(g);
  std::vector<ResidualReport> closed;
  for (int c = 0; c < 3; ++c) {
    const OneForm w{{H[0] * sys.N[0].c[c], H[1] * sys.N[1].c[c], H[2] * sys.N[2].c[c]}};
    auto r = closedness_residual(w, integrability_guard(opts));
    r.name = "combescure_closedness_" + std::string(1, "xyz"[c]);
    if (!r.pass) throw CheckFailed(r);
    f.c[c] = integrate_oneform(w, base_node, base_point[c]);
    closed.push_back(std::move(r));
  }
  auto out = assemble_system(std::move(f), std::move(H), sys.N, sys.beta, "combescure(" + sys.provenance + ")");
  out.anchor = base_node;
  out.degenerate = out.degenerate || sys.degenerate;
  out.diagnostics = std::move(closed);
  return out;
}

std::pair<ResidualReport, ResidualReport> check_phi_triple(const OrthogonalSystem& sys, const PhiTriple& p,
                                                           const CheckOptions& opts) {
  const ScalarField sum = p.phi[0] + p.phi[1] + p.phi[2];
  const double phi_scale = sup_of({&p.phi[0], &p.phi[1], &p.phi[2]}, opts.collar);
  // Pointwise identity: no discretisation error beyond that of the inputs.
  auto sum_report = summarize("phi_sum", std::span(&sum, 1), phi_scale, opts);

  std::vector<ScalarField> res;
  double scale = 0.0;
  for (int j = 0; j < 3; ++j) {
    const int i = (j + 2) % 3, k = (j + 1) % 3;   // (i, j, k) cyclic
    const ScalarField a = partial_derivative(p.phi[j], j, opts.order);
    const ScalarField b = p.phi[i] * dlog_lame(sys, j, k);
    const ScalarField d = p.phi[k] * dlog_lame(sys, j, i);
    res.push_back(a - b - d);
    scale = std::max(scale, sup_of({&a, &b, &d}, opts.collar));
  }
  return {sum_report, summarize("phi_derivative", res, scale, opts)};
}

PhiTriple guichard_phi_triple(const OrthogonalSystem& sys) {
  const auto& H = sys.H;
  return {{-H[0] / (H[1] * H[2]), -H[1] / (H[0] * H[2]), H[2] / (H[0] * H[1])}};
}

PhiIntegration phi_triple_to_combescure(const OrthogonalSystem& sys, const PhiTriple& p, double c,
                                        const Node& base_node, const CheckOptions& opts) {
  const auto [sum, deriv] = check_phi_triple(sys, p, opts);
  if (!sum.pass) throw CheckFailed(sum);
  if (!deriv.pass) throw CheckFailed(deriv);

  const auto bidx = sys.grid().index(base_node);
  // h_i - h_j = phi_k for cyclic (i, j, k), anchored by h_3(base) = c.
  const std::array<double, 3> base{c - p.phi[1].values()[bidx], c + p.phi[0].values()[bidx], c};

  PhiIntegration out;
  for (int j = 0; j < 3; ++j) {
    const int i = (j + 2) % 3, k = (j + 1) % 3;
    OneForm w;
    // d_j h_j = phi_i d_j ln H_k + d_j phi_i, d_k h_j = -phi_i d_k ln H_j, d_i h_j = phi_k d_i ln H_j
    w.g[j] = p.phi[i] * dlog_lame(sys, j, k) + partial_derivative(p.phi[i], j, opts.order);
    w.g[k] = -p.phi[i] * dlog_lame(sys, k, j);
    w.g[i] = p.phi[k] * dlog_lame(sys, i, j);
    auto r = closedness_residual(w, integrability_guard(opts));
    r.name = "h" + std::to_string(j + 1) + "_closedness";
    if (!r.pass) throw CheckFailed(r);
    out.triple.h[j] = integrate_oneform(w, base_node, base[j]);
    out.reports.push_back(std::move(r));
  }
  std::vector<ScalarField> diff;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    diff.push_back(out.triple.h[i] - out.triple.h[j] - p.phi[k]);
  }
  out.reports.push_back(summarize("phi_differences", diff, sup_of({&p.phi[0], &p.phi[1], &p.phi[2]}, opts.collar), opts));
  return out;
}

}  // namespace orthonet
