#include "orthonet/system.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "line_march.hpp"

namespace orthonet {

namespace {

std::array<VectorField, 3> tangents(const VectorField& f, int order) {
  std::array<VectorField, 3> T;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) T[i].c[c] = partial_derivative(f.c[c], i, order);
  return T;
}

VectorField vector_partial(const VectorField& v, int axis, int order) {
  return {partial_derivative(v.c[0], axis, order), partial_derivative(v.c[1], axis, order),
          partial_derivative(v.c[2], axis, order)};
}

double max_sup(std::initializer_list<const ScalarField*> fields, int collar) {
  double s = 0.0;
  for (const auto* f : fields) s = std::max(s, sup_over(std::span(f, 1), collar));
  return s;
}

ScalarField det3(const VectorField& a, const VectorField& b, const VectorField& c) { return dot(a, cross(b, c)); }

}  // namespace

ScalarField second_derivative(const ScalarField& field, int i, int j, int order) {
  if (i == j && field.grid().n(i) >= (order == 2 ? 4 : 6)) return second_partial_derivative(field, i, order);
  return partial_derivative(partial_derivative(field, i, order), j, order);
}

ScalarField dlog_lame(const OrthogonalSystem& sys, int i, int j) { return sys.beta[i][j] * sys.H[i] / sys.H[j]; }

BetaFields rotational_coefficients(const std::array<ScalarField, 3>& H, int order, double threshold) {
  const GridSpec& g = H[0].grid();
  for (int i = 0; i < 3; ++i)
    for (std::size_t p = 0; p < g.size(); ++p)
      if (!(std::abs(H[i].values()[p]) >= threshold))
        throw DegenerateNode("Lame coefficient H" + std::to_string(i + 1) + " vanishes", g.node(p));
  BetaFields beta;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      beta[i][j] = i == j ? ScalarField(g) : partial_derivative(H[j], i, order) / H[i];
  return beta;
}

OrthogonalSystem assemble_system(VectorField f, std::array<ScalarField, 3> H, std::array<VectorField, 3> N,
                                 BetaFields beta, std::string provenance) {
  OrthogonalSystem s;
  s.f = std::move(f);
  s.H = std::move(H);
  s.N = std::move(N);
  s.beta = std::move(beta);
  s.provenance = std::move(provenance);
  s.degenerate = has_vanishing_lame(s.H);
  return s;
}

bool has_vanishing_lame(const std::array<ScalarField, 3>& H, double threshold) {
  double scale = 0.0;
  for (const auto& h : H) scale = std::max(scale, h.sup_abs());
  for (const auto& h : H)
    if ((h.values().abs() <= threshold * std::max(scale, 1.0)).any()) return true;
  return false;
}

OrthogonalSystem build_from_parametrization(const VectorField& f, const CheckOptions& opts, std::string provenance) {
  const GridSpec& g = f.grid();
  const auto T = tangents(f, opts.order);
  std::array<ScalarField, 3> H;
  for (int i = 0; i < 3; ++i) H[i] = sqrt(norm2(T[i]));
  const ScalarField det = det3(T[0], T[1], T[2]);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double vol = H[0].values()[p] * H[1].values()[p] * H[2].values()[p];
    if (!(std::abs(det.values()[p]) > 1e-12 * std::max(vol, 1e-300)) || vol == 0.0)
      throw DegenerateNode("degenerate Jacobian", g.node(p));
  }
  std::array<VectorField, 3> N;
  for (int i = 0; i < 3; ++i) N[i] = (1.0 / H[i]) * T[i];
  auto beta = rotational_coefficients(H, opts.order);
  auto sys = assemble_system(f, std::move(H), std::move(N), std::move(beta), std::move(provenance));
  sys.diagnostics.push_back(check_orthogonality(sys, opts));
  return sys;
}

std::pair<ResidualReport, ResidualReport> check_lame(const std::array<ScalarField, 3>& H, const CheckOptions& opts) {
  const int o = opts.order;
  std::array<std::array<ScalarField, 3>, 3> dH;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) dH[a][b] = partial_derivative(H[b], a, o);  // d_a H_b

  std::vector<ScalarField> first, second;
  double scale1 = 0.0, scale2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    const ScalarField dij = second_derivative(H[k], i, j, o);
    const ScalarField t1 = (dH[j][i] / H[i]) * dH[i][k];
    const ScalarField t2 = (dH[i][j] / H[j]) * dH[j][k];
    first.push_back(dij - t1 - t2);
    scale1 = std::max(scale1, max_sup({&dij, &t1, &t2}, opts.collar));

    const ScalarField s1 = dH[k][i] * dH[k][j] / square(H[k]);
    // d_j(d_j H_i / H_j) and d_i(d_i H_j / H_i), expanded around compact second differences
    const ScalarField s2 = second_derivative(H[i], j, j, o) / H[j];
    const ScalarField s3 = dH[j][i] * dH[j][j] / square(H[j]);
    const ScalarField s4 = second_derivative(H[j], i, i, o) / H[i];
    const ScalarField s5 = dH[i][j] * dH[i][i] / square(H[i]);
    second.push_back(s1 + s2 - s3 + s4 - s5);
    scale2 = std::max(scale2, max_sup({&s1, &s2, &s3, &s4, &s5}, opts.collar));
  }
  return {summarize("lame_first", first, scale1, opts), summarize("lame_second", second, scale2, opts)};
}

std::pair<ResidualReport, ResidualReport> check_lame(const OrthogonalSystem& sys, const CheckOptions& opts) {
  return check_lame(sys.H, opts);
}

ResidualReport check_orthogonality(const OrthogonalSystem& sys, const CheckOptions& opts) {
  const auto T = tangents(sys.f, opts.order);
  std::vector<ScalarField> res;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      res.push_back(dot(T[i], T[j]));
      const ScalarField m = sqrt(norm2(T[i]) * norm2(T[j]));
      scale = std::max(scale, sup_over(std::span(&m, 1), opts.collar));
    }
  return summarize("orthogonality", res, scale, opts);
}

ResidualReport check_metric(const OrthogonalSystem& sys, const CheckOptions& opts) {
  const auto T = tangents(sys.f, opts.order);
  std::vector<ScalarField> res;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    const VectorField d = T[i] - sys.H[i] * sys.N[i];
    for (int c = 0; c < 3; ++c) res.push_back(d.c[c]);
    scale = std::max(scale, sup_over(std::span(&sys.H[i], 1), opts.collar));
  }
  return summarize("metric", res, scale, opts);
}

ResidualReport check_frame_orthonormality(const OrthogonalSystem& sys, const CheckOptions& opts) {
  std::vector<ScalarField> res;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) res.push_back(dot(sys.N[i], sys.N[j]) - (i == j ? 1.0 : 0.0));
  return summarize("frame_orthonormality", res, 1.0, opts);
}

std::pair<ResidualReport, ResidualReport> check_frame_system(const OrthogonalSystem& sys, const CheckOptions& opts) {
  std::vector<ScalarField> off, diag;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      scale = std::max(scale, sup_over(std::span(&sys.beta[i][j], 1), opts.collar));
      const VectorField d = vector_partial(sys.N[i], j, opts.order) - sys.beta[i][j] * sys.N[j];
      for (int c = 0; c < 3; ++c) off.push_back(d.c[c]);
    }
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const VectorField d =
        vector_partial(sys.N[i], i, opts.order) + sys.beta[j][i] * sys.N[j] + sys.beta[k][i] * sys.N[k];
    for (int c = 0; c < 3; ++c) diag.push_back(d.c[c]);
  }
  return {summarize("frame_offdiagonal", off, scale, opts), summarize("frame_diagonal", diag, scale, opts)};
}

ResidualReport check_beta_consistency(const std::array<ScalarField, 3>& H, const BetaFields& beta,
                                      const CheckOptions& opts) {
  std::vector<ScalarField> res;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const ScalarField a = H[i] * beta[i][j];
      const ScalarField b = partial_derivative(H[j], i, opts.order);
      res.push_back(a - b);
      scale = std::max(scale, max_sup({&a, &b}, opts.collar));
    }
  return summarize("beta_consistency", res, scale, opts);
}

ResidualReport check_beta_consistency(const OrthogonalSystem& sys, const CheckOptions& opts) {
  return check_beta_consistency(sys.H, sys.beta, opts);
}

ResidualReport check_determinant(const OrthogonalSystem& sys, const CheckOptions& opts) {
  const auto T = tangents(sys.f, opts.order);
  const ScalarField vol = sys.H[0] * sys.H[1] * sys.H[2];
  const ScalarField res = det3(T[0], T[1], T[2]) - orientation(sys) * vol;
  return summarize("determinant", std::span(&res, 1), sup_over(std::span(&vol, 1), opts.collar), opts);
}

namespace {

ResidualReport point_equation(const OrthogonalSystem& sys, int i, int j, std::span<const ScalarField> comps,
                              const CheckOptions& opts, std::string name) {
  if (i == j || i < 0 || j < 0 || i > 2 || j > 2) throw std::invalid_argument("point equation needs i != j");
  const int o = opts.order;
  const ScalarField lj = partial_derivative(sys.H[i], j, o) / sys.H[i];  // d_j ln H_i
  const ScalarField li = partial_derivative(sys.H[j], i, o) / sys.H[j];  // d_i ln H_j
  std::vector<ScalarField> res;
  double scale = 0.0;
  for (const auto& u : comps) {
    const ScalarField di = partial_derivative(u, i, o);
    const ScalarField dij = partial_derivative(di, j, o);
    const ScalarField a = lj * di;
    const ScalarField b = li * partial_derivative(u, j, o);
    res.push_back(dij - a - b);
    scale = std::max(scale, max_sup({&dij, &a, &b}, opts.collar));
  }
  return summarize(std::move(name), res, scale, opts);
}

}  // namespace

ResidualReport check_point_equation(const OrthogonalSystem& sys, int i, int j, const CheckOptions& opts) {
  return point_equation(sys, i, j, sys.f.c, opts,
                        "point_equation_" + std::to_string(i + 1) + std::to_string(j + 1));
}

ResidualReport check_point_equation(const OrthogonalSystem& sys, int i, int j, const ScalarField& theta,
                                    const CheckOptions& opts) {
  return point_equation(sys, i, j, std::span(&theta, 1), opts,
                        "point_equation_scalar_" + std::to_string(i + 1) + std::to_string(j + 1));
}

ScalarField orientation(const OrthogonalSystem& sys) { return det3(sys.N[0], sys.N[1], sys.N[2]); }

ScalarField chi_trace(const std::array<ScalarField, 3>& H) {
  return kEpsilon[0] * square(H[0]) + kEpsilon[1] * square(H[1]) + kEpsilon[2] * square(H[2]);
}

ScalarField chi_trace(const OrthogonalSystem& sys) { return chi_trace(sys.H); }

ChiClassification classify_chi(const OrthogonalSystem& sys, const CheckOptions& opts) {
  const ScalarField chi = chi_trace(sys);
  const ScalarField r2 = norm2(sys.f);
  double scale = 0.0;
  for (const auto& h : sys.H) {
    const ScalarField h2 = square(h);
    scale = std::max(scale, sup_over(std::span(&h2, 1), opts.collar));
  }
  ChiClassification out;
  out.tolerance = default_tolerance(sys.grid(), scale, opts);

  const auto keep = collar_mask(sys.grid(), opts.collar);
  double lo = INFINITY, hi = -INFINITY, sup = 0.0, cr = 0.0, rr = 0.0;
  for (std::size_t p = 0; p < keep.size(); ++p) {
    if (!keep[p]) continue;
    const double c = chi.values()[p], q = r2.values()[p];
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    sup = std::max(sup, std::abs(c));
    cr += c * q;
    rr += q * q;
  }
  if (sup <= out.tolerance) {
    out.kind = ChiKind::Guichard;
    out.spread = sup;
    return out;
  }
  if (0.5 * (hi - lo) <= out.tolerance) {
    out.kind = ChiKind::ConstantTrace;
    out.constant = 0.5 * (hi + lo);
    out.spread = 0.5 * (hi - lo);
    return out;
  }
  const double a = rr > 0.0 ? cr / rr : 0.0;
  double dev = 0.0;
  for (std::size_t p = 0; p < keep.size(); ++p)
    if (keep[p]) dev = std::max(dev, std::abs(chi.values()[p] - a * r2.values()[p]));
  out.spread = dev;
  if (a > 0.0 && dev <= out.tolerance) {
    out.kind = ChiKind::SphereTrace;
    out.constant = a;
    return out;
  }
  out.kind = ChiKind::Other;
  return out;
}

std::string to_string(ChiKind kind) {
  switch (kind) {
    case ChiKind::Guichard: return "guichard";
    case ChiKind::ConstantTrace: return "constant-trace";
    case ChiKind::SphereTrace: return "sphere-trace";
    case ChiKind::Other: break;
  }
  return "other";
}

OrthogonalSystem invert_system(const OrthogonalSystem& sys, double threshold) {
  const GridSpec& g = sys.grid();
  const ScalarField r2 = norm2(sys.f);
  for (std::size_t p = 0; p < g.size(); ++p)
    if (!(r2.values()[p] >= threshold)) throw DegenerateNode("inversion centre on the domain", g.node(p));
  const ScalarField inv = 1.0 / r2;
  std::array<ScalarField, 3> H;
  std::array<VectorField, 3> N;
  std::array<ScalarField, 3> fn;
  for (int i = 0; i < 3; ++i) {
    H[i] = sys.H[i] * inv;
    fn[i] = dot(sys.f, sys.N[i]);
    N[i] = sys.N[i] - (2.0 * fn[i] * inv) * sys.f;
  }
  BetaFields beta;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      beta[i][j] = i == j ? ScalarField(g) : sys.beta[i][j] - 2.0 * sys.H[j] * fn[i] * inv;
  auto out = assemble_system(inv * sys.f, std::move(H), std::move(N), std::move(beta),
                             "inversion(" + sys.provenance + ")");
  out.degenerate = out.degenerate || sys.degenerate;
  return out;
}

FrameIntegration integrate_frame(const std::array<ScalarField, 3>& H, const Eigen::Matrix3d& seed, const Node& base,
                                 const Eigen::Vector3d& base_point, const CheckOptions& opts) {
  const GridSpec& g = H[0].grid();
  if (!g.contains(base)) throw std::out_of_range("base node outside the grid");
  if ((seed * seed.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("seed frame is not orthonormal");
  if (seed.determinant() < 0.0) throw std::invalid_argument("seed frame is not right-handed");

  const BetaFields beta = rotational_coefficients(H, opts.order);
  auto rhs = [](int a, const Eigen::Matrix3d& B, const Eigen::Matrix3d& Phi) {
    Eigen::Matrix3d W = Eigen::Matrix3d::Zero();
    for (int m = 0; m < 3; ++m) {
      if (m == a) continue;
      W(m, a) = B(m, a);
      W(a, m) = -B(m, a);
    }
    return Eigen::Matrix3d(W * Phi);
  };
  ScalarField drift(g);
  auto project = [&](Eigen::Matrix3d& Phi, std::size_t p) {
    const double defect = (Phi * Phi.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    drift.values()[p] = std::max(drift.values()[p], defect);
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(Phi, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Phi = svd.matrixU() * svd.matrixV().transpose();
  };
  std::vector<Eigen::Matrix3d> forward(g.size()), backward(g.size());
  forward[g.index(base)] = backward[g.index(base)] = seed;
  detail::march(g, beta, base, {0, 1, 2}, forward, rhs, project);
  detail::march(g, beta, base, {2, 1, 0}, backward, rhs, project);

  ScalarField mismatch(g);
  for (std::size_t p = 0; p < g.size(); ++p)
    mismatch.values()[p] = (forward[p] - backward[p]).cwiseAbs().maxCoeff();

  std::array<VectorField, 3> N;
  for (int i = 0; i < 3; ++i) {
    N[i] = VectorField(g);
    for (std::size_t p = 0; p < g.size(); ++p)
      for (int c = 0; c < 3; ++c) N[i].c[c].values()[p] = forward[p](i, c);
  }
  VectorField f(g);
  for (int c = 0; c < 3; ++c) {
    OneForm w{{H[0] * N[0].c[c], H[1] * N[1].c[c], H[2] * N[2].c[c]}};
    f.c[c] = integrate_oneform(w, base, base_point[c]);
  }

  double bsup = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) bsup = std::max(bsup, beta[i][j].sup_abs());
  double diameter = 0.0;
  for (int a = 0; a < 3; ++a) diameter += g.hi()[a] - g.lo()[a];

  CheckOptions all = opts;
  all.collar = 0;
  FrameIntegration out{assemble_system(std::move(f), H, std::move(N), beta, "integrate_frame"),
                       summarize("path_dependence", std::span(&mismatch, 1), std::max(1.0, bsup * diameter), all),
                       summarize("frame_drift", std::span(&drift, 1), 1.0, all)};
  out.system.anchor = base;
  out.system.diagnostics = {out.path_dependence, out.frame_drift};
  return out;
}

ResidualReport compare_metric(const OrthogonalSystem& sys, const std::array<ScalarField, 3>& H,
                              const CheckOptions& opts) {
  const auto T = tangents(sys.f, opts.order);
  std::vector<ScalarField> res;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    res.push_back(sqrt(norm2(T[i])) - abs(H[i]));
    scale = std::max(scale, sup_over(std::span(&H[i], 1), opts.collar));
  }
  return summarize("metric_comparison", res, scale, opts);
}

void write_slice_obj(std::ostream& os, const VectorField& f, int axis, int index) {
  const GridSpec& g = f.grid();
  if (axis < 0 || axis > 2 || index < 0 || index >= g.n(axis)) throw std::out_of_range("slice outside the grid");
  const int u = axis == 0 ? 1 : 0, v = axis == 2 ? 1 : 2;
  const int nu = g.n(u), nv = g.n(v);
  os.precision(17);
  Node nd{};
  nd[axis] = index;
  for (int a = 0; a < nu; ++a)
    for (int b = 0; b < nv; ++b) {
      nd[u] = a;
      nd[v] = b;
      const Eigen::Vector3d p = f.at(nd);
      os << "v " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    }
  for (int a = 0; a + 1 < nu; ++a)
    for (int b = 0; b + 1 < nv; ++b) {
      const int v00 = a * nv + b + 1, v10 = (a + 1) * nv + b + 1, v11 = v10 + 1, v01 = v00 + 1;
      os << "f " << v00 << ' ' << v10 << ' ' << v11 << '\n';
      os << "f " << v00 << ' ' << v11 << ' ' << v01 << '\n';
    }
}

}  // namespace orthonet
