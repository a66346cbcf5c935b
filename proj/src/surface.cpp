#include "orthonet/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/QR>

namespace orthonet {

namespace {

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

double sup_slice(const std::vector<SliceField>& fields, const SliceGrid& g, int collar, const Mask* mask = nullptr) {
  double sup = 0.0;
  for (const auto& f : fields)
    for (int a = collar; a < g.n(0) - collar; ++a)
      for (int b = collar; b < g.n(1) - collar; ++b)
        if (!mask || (*mask)(a, b)) {
          const double v = std::abs(f(a, b));
          if (std::isfinite(v)) sup = std::max(sup, v);
        }
  return sup;
}

double slice_tolerance(const SliceGrid& g, double scale, const CheckOptions& opts) {
  if (opts.tolerance) return *opts.tolerance;
  const double h = std::max(g.spacing(0), g.spacing(1));
  return std::max(1e-8, opts.factor * h * h * scale);
}

SliceField dlog(const SliceField& H, const SliceGrid& g, int dir, int order) {
  return slice_derivative(H, g, dir, order) / H;
}

}  // namespace

Node SliceGrid::node(int a, int b) const {
  Node nd{};
  nd[axis] = index;
  nd[axes[0]] = a;
  nd[axes[1]] = b;
  return nd;
}

SliceField restrict_field(const ScalarField& field, const SliceGrid& g) {
  SliceField out(g.n(0), g.n(1));
  for (int a = 0; a < g.n(0); ++a)
    for (int b = 0; b < g.n(1); ++b) out(a, b) = field.at(g.node(a, b));
  return out;
}

SliceField slice_derivative(const SliceField& field, const SliceGrid& g, int dir, int order) {
  if (dir != 0 && dir != 1) throw std::out_of_range("slice direction must be 0 or 1");
  if (field.rows() != g.n(0) || field.cols() != g.n(1)) throw std::invalid_argument("field does not match the slice");
  SliceField out(field.rows(), field.cols());
  const std::ptrdiff_t rows = field.rows();
  if (dir == 0) {
    for (int b = 0; b < g.n(1); ++b)
      detail::differentiate_line(field.data() + b * rows, 1, g.n(0), g.spacing(0), order, out.data() + b * rows, 1);
  } else {
    for (int a = 0; a < g.n(0); ++a)
      detail::differentiate_line(field.data() + a, rows, g.n(1), g.spacing(1), order, out.data() + a, rows);
  }
  return out;
}

ResidualReport summarize_slice(std::string name, const std::vector<SliceField>& residuals, double scale,
                               const SliceGrid& g, const CheckOptions& opts, const Mask* mask) {
  ResidualReport r;
  r.name = std::move(name);
  r.scale = scale;
  r.grid = g.parent;
  r.collar_excluded = opts.collar > 0;
  std::size_t inside = 0, masked = 0, count = 0;
  double sum2 = 0.0;
  bool nan = false;
  for (int a = opts.collar; a < g.n(0) - opts.collar; ++a)
    for (int b = opts.collar; b < g.n(1) - opts.collar; ++b) {
      ++inside;
      if (mask && !(*mask)(a, b)) {
        ++masked;
        continue;
      }
      for (const auto& f : residuals) {
        const double v = f(a, b);
        if (!std::isfinite(v)) {
          if (!nan) r.worst = g.node(a, b);
          nan = true;
          continue;
        }
        if (!nan && std::abs(v) >= r.sup) {
          r.sup = std::abs(v);
          r.worst = g.node(a, b);
        }
        sum2 += v * v;
        ++count;
      }
    }
  if (nan) r.sup = std::numeric_limits<double>::quiet_NaN();
  r.masked_fraction = inside ? double(masked) / double(inside) : 0.0;
  r.rms = count ? std::sqrt(sum2 / double(count)) : 0.0;
  r.tolerance = slice_tolerance(g, scale, opts);
  r.pass = !nan && r.sup <= r.tolerance;
  return r;
}

double slice_epsilon(int axis) { return axis == 2 ? 1.0 : -1.0; }

SurfaceSlice extract_slice(const OrthogonalSystem& sys, int axis, int index, const CheckOptions& opts) {
  const GridSpec& pg = sys.grid();
  if (axis < 0 || axis > 2) throw std::out_of_range("axis must be 0, 1 or 2");
  if (index < 0 || index >= pg.n(axis)) throw std::out_of_range("slice index outside the grid");
  SurfaceSlice s;
  s.grid.parent = pg;
  s.grid.axis = axis;
  s.grid.index = index;
  s.grid.axes = {axis == 0 ? 1 : 0, axis == 2 ? 1 : 2};
  const int u = s.grid.axes[0], v = s.grid.axes[1];
  for (int a = 0; a < 3; ++a) {
    s.f[a] = restrict_field(sys.f[a], s.grid);
    s.normal[a] = restrict_field(sys.N[axis][a], s.grid);
  }
  s.H1 = restrict_field(sys.H[u], s.grid);
  s.H2 = restrict_field(sys.H[v], s.grid);
  s.kappa1 = -restrict_field(sys.beta[axis][u], s.grid) / s.H1;
  s.kappa2 = -restrict_field(sys.beta[axis][v], s.grid) / s.H2;
  const SliceField diff = s.kappa1 - s.kappa2;
  s.umbilic_defect = sup_slice({diff}, s.grid, opts.collar);
  s.umbilic = s.umbilic_defect <= slice_tolerance(s.grid, sup_slice({s.kappa1, s.kappa2}, s.grid, opts.collar), opts);
  return s;
}

ResidualReport check_surface_point_solution(const SurfaceSlice& s, const SliceField& theta, const CheckOptions& opts) {
  const auto& g = s.grid;
  const int o = opts.order;
  const SliceField tu = slice_derivative(theta, g, 0, o);
  const SliceField tv = slice_derivative(theta, g, 1, o);
  const SliceField tuv = slice_derivative(tu, g, 1, o);
  const SliceField a = dlog(s.H1, g, 1, o) * tu;
  const SliceField b = dlog(s.H2, g, 0, o) * tv;
  return summarize_slice("surface_point_equation", {tuv - a - b}, sup_slice({tuv, a, b}, g, opts.collar), g, opts);
}

SliceField SurfaceCombescurePair::delta() const { return (h * l).sign(); }
SliceField SurfaceCombescurePair::kappa1_hat(const SurfaceSlice& s) const { return delta() * s.kappa1 / h; }
SliceField SurfaceCombescurePair::kappa2_hat(const SurfaceSlice& s) const { return delta() * s.kappa2 / l; }

SurfaceCombescurePair restrict_pair(const std::array<ScalarField, 3>& triple, const SliceGrid& g) {
  return {restrict_field(triple[g.axes[0]], g), restrict_field(triple[g.axes[1]], g)};
}

ResidualReport check_pair_compatibility(const SurfaceSlice& s, const SurfaceCombescurePair& p,
                                        const CheckOptions& opts) {
  const auto& g = s.grid;
  const SliceField hv = slice_derivative(p.h, g, 1, opts.order);
  const SliceField lu = slice_derivative(p.l, g, 0, opts.order);
  const SliceField a = (p.l - p.h) * dlog(s.H1, g, 1, opts.order);
  const SliceField b = (p.h - p.l) * dlog(s.H2, g, 0, opts.order);
  return summarize_slice("pair_compatibility", {hv - a, lu - b}, sup_slice({hv, lu, a, b}, g, opts.collar), g, opts);
}

GReport check_G_condition(const SurfaceSlice& s, const SurfaceCombescurePair& p, double epsilon, double c, bool fit,
                          const CheckOptions& opts) {
  if (c == 0.0) throw std::invalid_argument("G-condition constant must be nonzero");
  const auto& g = s.grid;
  GReport rep;
  rep.epsilon = epsilon;
  rep.c = c;
  const SliceField d2 = (p.h - p.l).square();
  const SliceField H1s = s.H1.square(), H2s = s.H2.square();
  const SliceField lhs = c * H1s * H2s * d2;
  const SliceField rhs = H2s + epsilon * H1s;
  rep.fixed = summarize_slice("G_condition", {lhs - rhs}, sup_slice({lhs, H1s, H2s}, g, opts.collar), g, opts);
  const SliceField dhl = p.h - p.l;
  rep.nontrivial = sup_slice({dhl}, g, opts.collar) > slice_tolerance(g, sup_slice({p.h, p.l}, g, opts.collar), opts);
  if (!fit) return rep;

  // c H1^2 H2^2 (h - l)^2 = a(u) H2^2 + eps b(v) H1^2, linear in (a, b).
  const int n0 = g.n(0), n1 = g.n(1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Eigen::Index(n0) * n1, n0 + n1);
  Eigen::VectorXd y(Eigen::Index(n0) * n1);
  for (int a = 0; a < n0; ++a)
    for (int b = 0; b < n1; ++b) {
      const Eigen::Index row = Eigen::Index(a) * n1 + b;
      A(row, a) = H2s(a, b);
      A(row, n0 + b) = epsilon * H1s(a, b);
      y[row] = lhs(a, b);
    }
  // minimum-norm correction to a = b = 1, so the fixed form wins whenever the fit is not unique
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n0 + n1);
  const Eigen::VectorXd x = ones + A.completeOrthogonalDecomposition().solve(y - A * ones);
  const Eigen::ArrayXd av = x.head(n0).array(), bv = x.tail(n1).array();
  SliceField fitted(n0, n1);
  for (int a = 0; a < n0; ++a)
    for (int b = 0; b < n1; ++b) fitted(a, b) = av[a] * H2s(a, b) + epsilon * bv[b] * H1s(a, b);
  rep.reparametrized = summarize_slice("G_condition_reparametrized", {lhs - fitted},
                                       sup_slice({lhs, fitted}, g, opts.collar), g, opts);
  if ((av > 0).all() && (bv > 0).all()) {
    rep.chi1 = av.rsqrt();
    rep.chi2 = bv.rsqrt();
  }
  return rep;
}

SurfaceCombescurePair surface_dual(const SurfaceSlice& s, const SurfaceCombescurePair& p, double epsilon,
                                   double delta_tilde, const CheckOptions& opts) {
  if (delta_tilde != 1.0 && delta_tilde != -1.0) throw std::invalid_argument("delta~ must be +1 or -1");
  const GReport gr = check_G_condition(s, p, epsilon, 1.0, false, opts);
  if (!gr.fixed.pass) throw CheckFailed(gr.fixed);
  return {delta_tilde * (-p.h.square() + s.H1.square().inverse()),
          delta_tilde * (-p.l.square() + epsilon * s.H2.square().inverse())};
}

DualRelationReport check_dual_relation(const SurfaceSlice& s, const SurfaceCombescurePair& p,
                                       const SurfaceCombescurePair& star, const CheckOptions& opts) {
  const auto& g = s.grid;
  DualRelationReport rep;
  const SliceField hl = p.h * p.l;
  rep.relation = summarize_slice("dual_relation", {star.h + star.l + 2.0 * hl},
                                 std::max(1.0, sup_slice({star.h, star.l, hl}, g, opts.collar)), g, opts);
  const SliceField tu = star.h + p.h.square(), tv = star.l + p.l.square();
  const double tol_u = slice_tolerance(g, std::max(1.0, sup_slice({star.h, p.h.square()}, g, opts.collar)), opts);
  const double tol_v = slice_tolerance(g, std::max(1.0, sup_slice({star.l, p.l.square()}, g, opts.collar)), opts);
  rep.nontrivial_u = sup_slice({tu}, g, opts.collar) > tol_u;
  rep.nontrivial_v = sup_slice({tv}, g, opts.collar) > tol_v;
  return rep;
}

DemoulinReport check_demoulin(const SurfaceSlice& s, const SurfaceCombescurePair& p,
                              const SurfaceCombescurePair& star, double epsilon, const CheckOptions& opts) {
  const auto& g = s.grid;
  const SliceField& k1 = s.kappa1;
  const SliceField& k2 = s.kappa2;
  const double kscale = sup_slice({k1, k2}, g, opts.collar);
  const double thr = 1e-6 * kscale;
  Mask mask = (k1.abs() > thr) && (k2.abs() > thr) && ((k1 - k2).abs() > thr);
  if (kscale == 0.0) mask.setConstant(false);

  DemoulinReport rep;
  // multiplied by k1^2 k2^2, with 1/k* = h*/k and 1/k^ = h/k
  const SliceField lhs = (k2 - k1) * (star.h * k2 - star.l * k1);
  const SliceField t1 = k2.square() / s.H1.square();
  const SliceField t2 = epsilon * k1.square() / s.H2.square();
  const SliceField t3 = (p.h * k2 - p.l * k1).square();
  rep.lemma = summarize_slice("demoulin_lemma", {lhs - t1 - t2 + t3}, sup_slice({lhs, t1, t2, t3}, g, opts.collar, &mask),
                              g, opts, &mask);
  rep.omega = p.l * k1 - p.h * k2;
  if (!mask.block(opts.collar, opts.collar, g.n(0) - 2 * opts.collar, g.n(1) - 2 * opts.collar).any()) {
    rep.degenerate = true;
    rep.lemma.pass = false;
    rep.lemma.note = "degenerate: totally umbilic";
    return rep;
  }
  const double omega_sup = sup_slice({rep.omega}, g, opts.collar, &mask);
  const SliceField lk = p.l * k1, hk = p.h * k2;
  rep.demoulin = omega_sup <= slice_tolerance(g, sup_slice({lk, hk}, g, opts.collar, &mask), opts);
  return rep;
}

EisenhartPair eisenhart_pair_from_phi(const SurfaceSlice& s, const SliceField& phi, double constant,
                                      std::array<int, 2> base, const CheckOptions& opts) {
  const auto& g = s.grid;
  if (base[0] < 0 || base[0] >= g.n(0) || base[1] < 0 || base[1] >= g.n(1))
    throw std::out_of_range("base node outside the slice");
  const CheckOptions guard = integrability_guard(opts);
  const int o = guard.order;
  EisenhartPair out;

  const SliceField pu = slice_derivative(phi, g, 0, o);
  const SliceField pv = slice_derivative(phi, g, 1, o);
  const SliceField puv = slice_derivative(pu, g, 1, o);
  const SliceField l1v = dlog(s.H1, g, 1, o);
  const SliceField l2u = dlog(s.H2, g, 0, o);
  const SliceField mixed = slice_derivative(dlog(s.H1, g, 0, o) + l2u, g, 1, o);
  const SliceField t1 = l1v * pu, t2 = l2u * pv, t3 = phi * mixed;
  out.reports.push_back(summarize_slice("phi_equation", {puv + t1 + t2 + t3},
                                        sup_slice({puv, t1, t2, t3}, g, guard.collar), g, guard));
  if (!out.reports.back().pass) throw CheckFailed(out.reports.back());

  const SliceField gu = phi * l2u + pu;
  const SliceField gv = -phi * l1v;
  const SliceField cu = slice_derivative(gv, g, 0, o), cv = slice_derivative(gu, g, 1, o);
  const double extent = std::max(g.spacing(0) * (g.n(0) - 1), g.spacing(1) * (g.n(1) - 1));
  const double cscale = std::max(sup_slice({cu, cv}, g, guard.collar), sup_slice({gu, gv}, g, guard.collar) / extent);
  out.reports.push_back(summarize_slice("closedness", {cu - cv}, cscale, g, guard));
  if (!out.reports.back().pass) throw CheckFailed(out.reports.back());

  // u line through the base, then v lines
  SliceField h(g.n(0), g.n(1));
  Eigen::ArrayXd line(g.n(0)), col(g.n(1));
  const Eigen::ArrayXd gu_line = gu.col(base[1]);
  detail::integrate_line(gu_line.data(), 1, g.n(0), g.spacing(0), base[0], constant, line.data());
  for (int a = 0; a < g.n(0); ++a) {
    const Eigen::ArrayXd gv_line = gv.row(a).transpose();
    detail::integrate_line(gv_line.data(), 1, g.n(1), g.spacing(1), base[1], line[a], col.data());
    h.row(a) = col.transpose();
  }
  out.pair = {h, h - phi};
  return out;
}

FamilyAnalysis analyze_family(const OrthogonalSystem& sys, int axis, const CheckOptions& opts) {
  if (axis < 0 || axis > 2) throw std::out_of_range("axis must be 0, 1 or 2");
  const int i = axis, j = (i + 1) % 3, k = (i + 2) % 3;
  FamilyAnalysis out;
  out.axis = i;

  const ScalarField par[] = {sys.beta[j][i], sys.beta[k][i]};
  const ScalarField betas[] = {sys.beta[i][j], sys.beta[i][k], sys.beta[j][i], sys.beta[k][i]};
  out.parallel_report = summarize("parallel", par, std::max(1.0, sup_over(betas, opts.collar)), opts);
  out.parallel = out.parallel_report.pass;

  const ScalarField kij = -sys.beta[i][j] / sys.H[j];
  const ScalarField kik = -sys.beta[i][k] / sys.H[k];
  const ScalarField ks[] = {kij, kik};
  const ScalarField um[] = {kij - kik};
  out.umbilic_report = summarize("totally_umbilic", um, sup_over(ks, opts.collar), opts);
  out.totally_umbilic = out.umbilic_report.pass;

  const ScalarField kji = -sys.beta[j][i] / sys.H[i];
  const ScalarField kki = -sys.beta[k][i] / sys.H[i];
  const ScalarField dkji = partial_derivative(kji, i, opts.order);
  const ScalarField dkki = partial_derivative(kki, i, opts.order);
  const ScalarField cyc[] = {dkji, dkki};
  // d_i k is compared against the size of k per unit length
  double extent = 0.0;
  for (int a = 0; a < 3; ++a) extent = std::max(extent, sys.grid().hi()[a] - sys.grid().lo()[a]);
  const ScalarField kk[] = {kji, kki};
  out.cyclic_report = summarize("cyclic", cyc, std::max(sup_over(cyc, opts.collar), sup_over(kk, opts.collar) / extent),
                                opts);
  out.cyclic = out.cyclic_report.pass;

  // torsion in terms of beta: the common factor 1/H_i of both curvatures cancels
  const ScalarField& bj = sys.beta[j][i];
  const ScalarField& bk = sys.beta[k][i];
  const ScalarField den = square(bj) + square(bk);
  const ScalarField a = bj * partial_derivative(bk, i, opts.order), b = bk * partial_derivative(bj, i, opts.order);
  const ScalarField den_arr[] = {den};
  const double thr = 1e-6 * sup_over(den_arr, opts.collar);
  std::vector<char> mask(den.grid().size());
  out.torsion = ScalarField(den.grid());
  ScalarField weight(den.grid());
  for (std::size_t p = 0; p < mask.size(); ++p) {
    const double d = den.values()[p];
    mask[p] = d > thr && thr > 0.0;
    out.torsion.values()[p] = mask[p] ? (a.values()[p] - b.values()[p]) / d : std::numeric_limits<double>::quiet_NaN();
    weight.values()[p] = mask[p] ? (std::abs(a.values()[p]) + std::abs(b.values()[p])) / d : 0.0;
  }
  const ScalarField w[] = {weight};
  const ScalarField t[] = {out.torsion};
  out.torsion_report = summarize("torsion", t, sup_over(w, opts.collar), opts, &mask);
  if (thr == 0.0) out.torsion_report.note = "coordinate curves are straight";
  return out;
}

ResidualReport check_dupin(const SurfaceSlice& s, const CheckOptions& opts) {
  const auto& g = s.grid;
  const SliceField a = slice_derivative(s.kappa1, g, 0, opts.order);
  const SliceField b = slice_derivative(s.kappa2, g, 1, opts.order);
  double extent = std::max(g.spacing(0) * (g.n(0) - 1), g.spacing(1) * (g.n(1) - 1));
  const double scale = std::max(sup_slice({a, b}, g, opts.collar), sup_slice({s.kappa1, s.kappa2}, g, opts.collar) / extent);
  return summarize_slice("dupin", {a, b}, scale, g, opts);
}

}  // namespace orthonet
