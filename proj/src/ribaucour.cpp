#include "orthonet/ribaucour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "line_march.hpp"
#include "orthonet/guichard.hpp"

namespace orthonet {

namespace {

VectorField combine(const std::array<ScalarField, 3>& w, const std::array<VectorField, 3>& N) {
  return w[0] * N[0] + w[1] * N[1] + w[2] * N[2];
}

double sup_of(std::initializer_list<const ScalarField*> fields, int collar) {
  double s = 0.0;
  for (const ScalarField* f : fields) s = std::max(s, sup_over(std::span(f, 1), collar));
  return s;
}

void require_nonvanishing(const ScalarField& A, double threshold, const char* what) {
  const double cut = threshold * A.sup_abs();
  for (std::size_t p = 0; p < A.grid().size(); ++p)
    if (!(A.values()[p] > cut)) throw DegenerateNode(what, A.grid().node(p));
}

// Pointwise transform given gamma, phi and the Lame coefficients theta of
// fbar = sum gamma_i N_i.
OrthogonalSystem ribaucour_pointwise(const OrthogonalSystem& sys, const std::array<ScalarField, 3>& gamma,
                                     const ScalarField& phi, const std::array<ScalarField, 3>& theta,
                                     std::string provenance) {
  const GridSpec& g = sys.grid();
  const ScalarField A = square(gamma[0]) + square(gamma[1]) + square(gamma[2]);
  const VectorField fbar = combine(gamma, sys.N);
  const ScalarField s = 2.0 * phi / A;
  std::array<ScalarField, 3> H;
  std::array<VectorField, 3> N;
  BetaFields beta;
  for (int i = 0; i < 3; ++i) {
    H[i] = sys.H[i] - s * theta[i];
    N[i] = sys.N[i] - (2.0 * gamma[i] / A) * fbar;
    for (int j = 0; j < 3; ++j)
      beta[i][j] = i == j ? ScalarField(g) : sys.beta[i][j] - 2.0 * gamma[i] * theta[j] / A;
  }
  return assemble_system(sys.f - s * fbar, std::move(H), std::move(N), std::move(beta), std::move(provenance));
}

std::array<ScalarField, 3> project(const VectorField& v, const std::array<VectorField, 3>& N) {
  return {dot(v, N[0]), dot(v, N[1]), dot(v, N[2])};
}

ResidualReport check_alpha_trace(const OrthogonalSystem& fbar, double alpha, const CheckOptions& opts) {
  const ScalarField lhs = chi_trace(fbar.H);
  const ScalarField rhs = alpha * alpha * norm2(fbar.f);
  const ScalarField res[] = {lhs - rhs};
  return summarize("alpha_trace", res, std::max(1.0, sup_of({&lhs, &rhs}, opts.collar)), opts);
}

void require(const ResidualReport& r) {
  if (!r.pass) throw CheckFailed(r);
}

}  // namespace

ScalarField RibaucourData::A() const { return square(gamma[0]) + square(gamma[1]) + square(gamma[2]); }

std::array<ScalarField, 3> ribaucour_theta(const OrthogonalSystem& sys, const RibaucourData& d, int order) {
  std::array<ScalarField, 3> theta;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    theta[i] = partial_derivative(d.gamma[i], i, order) + sys.beta[j][i] * d.gamma[j] + sys.beta[k][i] * d.gamma[k];
  }
  return theta;
}

std::array<ScalarField, 3> sphere_radii(const RibaucourData& d, double threshold) {
  std::array<ScalarField, 3> R;
  for (int i = 0; i < 3; ++i) {
    R[i] = ScalarField(d.phi.grid());
    for (std::size_t p = 0; p < d.phi.grid().size(); ++p) {
      const double gi = d.gamma[i].values()[p];
      R[i].values()[p] = std::abs(gi) < threshold ? std::numeric_limits<double>::quiet_NaN() : -d.phi.values()[p] / gi;
    }
  }
  return R;
}

std::pair<ResidualReport, ResidualReport> check_ribaucour_data(const OrthogonalSystem& sys, const RibaucourData& d,
                                                               const CheckOptions& opts) {
  std::vector<ScalarField> gres, pres;
  double gscale = 0.0, pscale = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const ScalarField lhs = partial_derivative(d.gamma[j], i, opts.order);
      const ScalarField rhs = sys.beta[j][i] * d.gamma[i];
      gres.push_back(lhs - rhs);
      gscale = std::max(gscale, sup_of({&lhs, &rhs}, opts.collar));
    }
    const ScalarField lhs = partial_derivative(d.phi, i, opts.order);
    const ScalarField rhs = sys.H[i] * d.gamma[i];
    pres.push_back(lhs - rhs);
    pscale = std::max(pscale, sup_of({&lhs, &rhs}, opts.collar));
  }
  return {summarize("ribaucour_gamma", gres, gscale, opts), summarize("ribaucour_phi", pres, pscale, opts)};
}

OrthogonalSystem apply_ribaucour(const OrthogonalSystem& sys, const RibaucourData& d, const CheckOptions& opts,
                                 double threshold) {
  const auto [gr, pr] = check_ribaucour_data(sys, d, integrability_guard(opts));
  require(gr);
  require(pr);
  require_nonvanishing(d.A(), threshold, "sphere congruence degenerates (A = 0)");
  auto out = ribaucour_pointwise(sys, d.gamma, d.phi, ribaucour_theta(sys, d, opts.order),
                                 "ribaucour(" + sys.provenance + ")");
  out.diagnostics = {gr, pr};
  out.degenerate = has_vanishing_lame(out.H);
  return out;
}

RibaucourDecomposition decompose_ribaucour(const OrthogonalSystem& sys, const RibaucourData& d,
                                           const CheckOptions& opts, double threshold) {
  const auto [gr, pr] = check_ribaucour_data(sys, d, integrability_guard(opts));
  require(gr);
  require(pr);
  const ScalarField A = d.A();
  require_nonvanishing(A, threshold, "|fbar|^2 vanishes");

  RibaucourDecomposition out;
  auto theta = ribaucour_theta(sys, d, opts.order);
  out.fbar = assemble_system(combine(d.gamma, sys.N), theta, sys.N, sys.beta, "fbar(" + sys.provenance + ")");
  out.fbar.degenerate = has_vanishing_lame(theta);
  out.fbar_inverted = invert_system(out.fbar);
  out.reconstruction = sys.f - (2.0 * d.phi) * out.fbar_inverted.f;

  auto metric = check_metric(out.fbar, opts);
  metric.name = "fbar_metric";
  auto comb = check_beta_consistency(out.fbar_inverted, opts);
  comb.name = "decomposition_combescure";
  out.reports = {gr, pr, metric, comb};
  return out;
}

RibaucourData induce_ribaucour_family(const OrthogonalSystem& sys, const OrthogonalSystem& comb, double lambda,
                                      const Node& base, const CheckOptions& opts) {
  require(check_shared_beta(sys, comb, opts));
  RibaucourData d;
  d.gamma = project(comb.f, sys.N);
  const OneForm w{{sys.H[0] * d.gamma[0], sys.H[1] * d.gamma[1], sys.H[2] * d.gamma[2]}};
  require(closedness_residual(w, integrability_guard(opts)));
  const double phi0 = 0.5 * sys.f.at(base).dot(comb.f.at(base)) + lambda;
  d.phi = integrate_oneform(w, base, phi0);
  return d;
}

ScalarField BianchiData::A() const { return square(gamma[0]) + square(gamma[1]) + square(gamma[2]); }
ScalarField BianchiData::Abar() const { return square(gammabar[0]) + square(gammabar[1]) - square(gammabar[2]); }

BianchiIntegration integrate_bianchi(const OrthogonalSystem& sys, double alpha, const Eigen::Vector3d& gamma0,
                                     const Eigen::Vector3d& gammabar0, const Node& base, const CheckOptions& opts) {
  const GridSpec& g = sys.grid();
  if (!g.contains(base)) throw std::out_of_range("base node outside the grid");
  if (alpha == 0.0) throw std::invalid_argument("alpha must be nonzero");
  const double A0 = gamma0.squaredNorm();
  const double Abar0 = gammabar0[0] * gammabar0[0] + gammabar0[1] * gammabar0[1] - gammabar0[2] * gammabar0[2];
  if (!(A0 > 0.0)) throw std::invalid_argument("Bianchi seed needs A > 0");
  if (std::abs(A0 - Abar0) > 1e-12 * std::max(1.0, A0)) throw std::invalid_argument("Bianchi seed violates A = Abar");
  require(check_guichard(sys, opts).first);

  using State = Eigen::Matrix<double, 6, 1>;
  const auto& eps = kEpsilon;
  auto rhs = [&](int a, const Eigen::Matrix3d& B, const State& y) {
    State d;
    for (int i = 0; i < 3; ++i) {
      if (i == a) continue;
      d[i] = B(i, a) * y[a];
      d[3 + i] = B(a, i) * y[3 + a];
    }
    double s = alpha * y[3 + a], t = alpha * y[a];
    for (int m = 0; m < 3; ++m) {
      if (m == a) continue;
      s -= B(m, a) * y[m];
      t -= eps[m] * B(a, m) * y[3 + m];
    }
    d[a] = s;
    d[3 + a] = eps[a] * t;
    return d;
  };
  auto none = [](State&, std::size_t) {};
  State seed;
  seed << gamma0, gammabar0;
  std::vector<State> fwd(g.size()), bwd(g.size());
  fwd[g.index(base)] = bwd[g.index(base)] = seed;
  detail::march(g, sys.beta, base, {0, 1, 2}, fwd, rhs, none);
  detail::march(g, sys.beta, base, {2, 1, 0}, bwd, rhs, none);

  BianchiIntegration out;
  out.data.alpha = alpha;
  ScalarField mismatch(g);
  for (int i = 0; i < 3; ++i) {
    out.data.gamma[i] = ScalarField(g);
    out.data.gammabar[i] = ScalarField(g);
  }
  double ysup = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int i = 0; i < 3; ++i) {
      out.data.gamma[i].values()[p] = fwd[p][i];
      out.data.gammabar[i].values()[p] = fwd[p][3 + i];
    }
    mismatch.values()[p] = (fwd[p] - bwd[p]).cwiseAbs().maxCoeff();
    ysup = std::max(ysup, fwd[p].cwiseAbs().maxCoeff());
  }

  double bsup = 0.0, diameter = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) bsup = std::max(bsup, sys.beta[i][j].sup_abs());
  for (int a = 0; a < 3; ++a) diameter += g.hi()[a] - g.lo()[a];
  CheckOptions all = opts;
  all.collar = 0;
  out.path_dependence = summarize("path_dependence", std::span(&mismatch, 1),
                                  std::max(1.0, ysup) * std::max(1.0, bsup * diameter), all);

  const ScalarField A = out.data.A();
  const ScalarField drift[] = {A - out.data.Abar()};
  out.constraint = summarize("bianchi_constraint", drift, std::max(1.0, A.sup_abs()), all);

  std::array<ScalarField, 3> theta;
  for (int i = 0; i < 3; ++i) theta[i] = alpha * out.data.gammabar[i];
  out.fbar = assemble_system(combine(out.data.gamma, sys.N), theta, sys.N, sys.beta, "bianchi(" + sys.provenance + ")");
  out.fbar.degenerate = has_vanishing_lame(theta);
  out.trace = check_alpha_trace(out.fbar, alpha, all);
  out.metric = check_metric(out.fbar, opts);
  out.fbar.diagnostics = {out.path_dependence, out.constraint, out.trace, out.metric};
  return out;
}

ScalarField backlund_phi(const std::array<ScalarField, 3>& H, const OrthogonalSystem& fbar, double alpha) {
  ScalarField phi(H[0].grid());
  for (int i = 0; i < 3; ++i) phi += kEpsilon[i] * H[i] * fbar.H[i];
  return phi / (alpha * alpha);
}

OrthogonalSystem backlund(const OrthogonalSystem& sys, const OrthogonalSystem& fbar, double alpha, double lambda,
                          const CheckOptions& opts) {
  if (alpha == 0.0) throw std::invalid_argument("alpha must be nonzero");
  require(check_shared_beta(sys, fbar, opts));
  require(check_alpha_trace(fbar, alpha, opts));
  require_nonvanishing(norm2(fbar.f), 1e-6, "|fbar|^2 vanishes");
  const auto gamma = project(fbar.f, sys.N);
  const ScalarField phi = backlund_phi(sys.H, fbar, alpha) + lambda;
  auto out = ribaucour_pointwise(sys, gamma, phi, fbar.H, "backlund(" + sys.provenance + ")");
  const auto [gr, pr] = check_ribaucour_data(sys, {gamma, phi}, integrability_guard(opts));
  out.diagnostics = {gr, pr};
  out.degenerate = has_vanishing_lame(out.H);
  return out;
}

ResidualReport check_backlund_trace(const OrthogonalSystem& result, const OrthogonalSystem& sys,
                                    const OrthogonalSystem& fbar, double alpha, double lambda, double tolerance) {
  const ScalarField phi = backlund_phi(sys.H, fbar, alpha) + lambda;
  const ScalarField expected = 4.0 * alpha * alpha * lambda * phi / norm2(fbar.f);
  ScalarField rel = chi_trace(result) - expected;
  for (std::size_t p = 0; p < rel.grid().size(); ++p)
    rel.values()[p] /= std::max(1.0, std::abs(expected.values()[p]));
  CheckOptions o{.collar = 0, .tolerance = tolerance};
  return summarize("backlund_trace", std::span(&rel, 1), 1.0, o);
}

OrthogonalSystem backlund_lambda_system(const OrthogonalSystem& sys, const OrthogonalSystem& fbar, double alpha,
                                        const CheckOptions& opts) {
  if (has_vanishing_lame(sys.H)) throw std::invalid_argument("seed has a vanishing Lame coefficient");
  const auto chi = classify_chi(sys, opts);
  if (chi.kind != ChiKind::Guichard && chi.kind != ChiKind::ConstantTrace)
    throw std::invalid_argument("seed trace is not constant");
  auto out = backlund(sys, fbar, alpha, 0.0, opts);
  out.provenance = "backlund_lambda(" + sys.provenance + ")";
  return out;
}

PermutabilityResult check_permutability(const OrthogonalSystem& sys, const OrthogonalSystem& assoc,
                                        const OrthogonalSystem& dual, const OrthogonalSystem& fbar, double alpha,
                                        const CheckOptions& opts) {
  if (alpha == 0.0) throw std::invalid_argument("alpha must be nonzero");
  require(check_gsystem_relation(sys, assoc, dual, opts));
  require(check_alpha_trace(fbar, alpha, opts));
  for (const OrthogonalSystem* s : {&sys, &assoc, &dual}) require(check_shared_beta(*s, fbar, opts));
  require_nonvanishing(norm2(fbar.f), 1e-6, "|fbar|^2 vanishes");

  const ScalarField phi = backlund_phi(sys.H, fbar, alpha);
  const ScalarField phi_hat = backlund_phi(assoc.H, fbar, alpha);
  const ScalarField phi_star = backlund_phi(dual.H, fbar, alpha);
  const ScalarField A = norm2(fbar.f);
  const double a2 = alpha * alpha;

  PermutabilityResult out;
  std::vector<ScalarField> rel;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    const ScalarField t1 = phi * dual.H[i], t2 = phi_star * sys.H[i], t3 = 2.0 * phi_hat * assoc.H[i];
    const ScalarField rhs = (2.0 / a2) * fbar.H[i];
    rel.push_back(t1 + t2 + t3 - rhs);
    scale = std::max(scale, sup_of({&t1, &t2, &t3, &rhs}, opts.collar));
  }
  out.reports.push_back(summarize("phi_lame_relation", rel, scale, opts));
  const ScalarField p1 = phi * phi_star, p2 = square(phi_hat), p3 = A / a2;
  const ScalarField prod[] = {p1 + p2 - p3};
  out.reports.push_back(summarize("phi_product_relation", prod, sup_of({&p1, &p2, &p3}, opts.collar), opts));

  const auto gamma = project(fbar.f, sys.N);
  out.transformed = ribaucour_pointwise(sys, gamma, phi, fbar.H, "backlund(" + sys.provenance + ")");
  out.transformed_assoc = ribaucour_pointwise(assoc, gamma, phi_hat, fbar.H, "backlund(" + assoc.provenance + ")");
  out.transformed_dual = ribaucour_pointwise(dual, gamma, phi_star, fbar.H, "backlund(" + dual.provenance + ")");

  auto g = check_gsystem_relation(out.transformed, out.transformed_assoc, out.transformed_dual, opts);
  g.name = "transformed_gsystem_relation";
  out.reports.push_back(g);
  const char* names[] = {"transformed_beta", "transformed_assoc_beta", "transformed_dual_beta"};
  const OrthogonalSystem* ts[] = {&out.transformed, &out.transformed_assoc, &out.transformed_dual};
  for (int m = 0; m < 3; ++m) {
    auto r = check_beta_consistency(*ts[m], opts);
    r.name = names[m];
    out.reports.push_back(r);
  }
  return out;
}

}  // namespace orthonet
