#include <doctest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "orthonet/catalog.hpp"
#include "orthonet/combescure.hpp"
#include "orthonet/guichard.hpp"
#include "orthonet/ribaucour.hpp"

using namespace orthonet;

namespace {

const double kSqrt2 = std::sqrt(2.0);

GridSpec centered(int n = 33) { return GridSpec::cube(-0.5, 0.5, n); }
GridSpec box(int n = 33) { return GridSpec::cube(0.5, 1.5, n); }
Node middle(const GridSpec& g) { return {g.n(0) / 2, g.n(1) / 2, g.n(2) / 2}; }

RibaucourData exponential_data(const GridSpec& g) {
  RibaucourData d;
  d.gamma = {ScalarField::sample(g, [](double x, double, double) { return std::exp(x); }),
             ScalarField::sample(g, [](double, double y, double) { return std::exp(y); }), ScalarField(g)};
  d.phi = ScalarField::sample(g, [](double x, double y, double) { return std::exp(x) + std::exp(y); });
  return d;
}

OrthogonalSystem translated(OrthogonalSystem s, const Eigen::Vector3d& t) {
  for (int a = 0; a < 3; ++a) s.f.c[a] = s.f.c[a] + t[a];
  return s;
}

double max_diff(const VectorField& a, const VectorField& b) { return (a - b).sup_norm(); }

double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace

TEST_CASE("Ribaucour data") {
  const auto g = centered();
  const auto flat = sample(instantiate("flat-guichard"), g);
  const auto [gr, pr] = check_ribaucour_data(flat, exponential_data(g));
  CHECK(gr.sup == 0.0);
  CHECK(pr.pass);

  const auto six = sample(instantiate("six-sphere"), box());
  RibaucourData pos{{dot(six.f, six.N[0]), dot(six.f, six.N[1]), dot(six.f, six.N[2])}, 0.5 * norm2(six.f)};
  const auto [g6, p6] = check_ribaucour_data(six, pos);
  CHECK(g6.pass);
  CHECK(p6.pass);

  RibaucourData random = exponential_data(g);
  random.gamma[2] = ScalarField::sample(g, [](double x, double y, double z) { return std::sin(3 * x + y) * z; });
  CHECK_FALSE(check_ribaucour_data(flat, random).first.pass);
  CHECK_THROWS_AS(apply_ribaucour(flat, random), CheckFailed);
}

TEST_CASE("Ribaucour transform of the flat chart") {
  const auto g = centered();
  const Node o = middle(g);
  const auto flat = sample(instantiate("flat-guichard"), g);
  const auto d = exponential_data(g);
  const auto r = apply_ribaucour(flat, d, {.order = 4});
  const Eigen::Vector3d f0 = r.f.at(o);
  CHECK(f0[0] == doctest::Approx(-2.0));
  CHECK(f0[1] == doctest::Approx(-2.0));
  CHECK(f0[2] == doctest::Approx(0.0));
  CHECK(r.H[0].at(o) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(r.H[1].at(o) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(r.H[2].at(o) == doctest::Approx(kSqrt2));

  const auto r2 = apply_ribaucour(flat, d);
  CHECK(check_metric(r2).pass);
  CHECK(check_beta_consistency(r2).pass);
  CHECK(check_frame_orthonormality(r2).pass);
  CHECK(check_lame(r2).first.pass);

  // H'_1 comes within 0.006 of zero on this box, so the quotients in Lame's second
  // system carry a large constant; the residual still converges at second order
  const auto fine = apply_ribaucour(sample(instantiate("flat-guichard"), centered(65)), exponential_data(centered(65)));
  const double coarse_sup = check_lame(r2).second.sup;
  const double fine_sup = check_lame(fine, {.collar = 4}).second.sup;
  CHECK(order(coarse_sup, fine_sup) > 1.9);

  RibaucourData zero{{ScalarField(g), ScalarField(g), ScalarField(g)}, ScalarField(g, 1.0)};
  CHECK_THROWS_AS(apply_ribaucour(flat, zero), DegenerateNode);
}

TEST_CASE("position data give scaled inversions") {
  const auto g = box();
  const auto six = sample(instantiate("six-sphere"), g);
  for (double lambda : {-0.5, 0.3}) {
    const auto d = induce_ribaucour_family(six, six, lambda, middle(g));
    CHECK((d.phi - (0.5 * norm2(six.f) + lambda)).sup_abs() < 1e-3);
    const auto r = apply_ribaucour(six, d);
    const ScalarField s = -2.0 * lambda / norm2(six.f);
    CHECK(max_diff(r.f, s * six.f) < 5 * std::pow(g.max_spacing(), 2));
  }
  const auto d = induce_ribaucour_family(six, six, -0.5, middle(g));
  for (int i = 0; i < 3; ++i) CHECK((d.gamma[i] - dot(six.f, six.N[i])).sup_abs() == 0.0);

  const auto scaled = apply_combescure(six, constant_triple(g, 3.0), middle(g), 3.0 * six.f.at(middle(g)));
  const auto ds = induce_ribaucour_family(six, scaled, 0.0, middle(g));
  for (int i = 0; i < 3; ++i) CHECK((ds.gamma[i] - 3.0 * d.gamma[i]).sup_abs() < 5 * std::pow(g.max_spacing(), 2) * 3.0);

  const auto flat = sample(instantiate("flat-guichard"), g);
  CHECK_THROWS_AS(induce_ribaucour_family(six, flat, 0.0), CheckFailed);
}

TEST_CASE("transforms induced by one fbar are Combescure related") {
  const auto g = box();
  const auto six = sample(instantiate("six-sphere"), g);
  const auto b = integrate_bianchi(six, 1.0, {1, 1, 0}, {1, 1, 0}, middle(g));
  const auto r1 = apply_ribaucour(six, induce_ribaucour_family(six, b.fbar, 0.2, middle(g)));
  const auto r2 = apply_ribaucour(six, induce_ribaucour_family(six, b.fbar, 1.7, middle(g)));
  CHECK(check_beta_consistency(r1).pass);
  CHECK(check_beta_consistency(r2).pass);
  CHECK(check_beta_consistency(r1.H, r2.beta).pass);
  CHECK(check_beta_consistency(r2.H, r1.beta).pass);
}

TEST_CASE("decomposition into Combescure, inversion, Combescure") {
  const auto g = centered();
  const Node o = middle(g);
  const auto flat = sample(instantiate("flat-guichard"), g);
  const auto d = exponential_data(g);
  const auto dec = decompose_ribaucour(flat, d);
  for (const auto& r : dec.reports) CHECK_MESSAGE(r.pass, r.name);

  const ScalarField ex = ScalarField::sample(g, [](double x, double, double) { return std::exp(x); });
  const ScalarField ey = ScalarField::sample(g, [](double, double y, double) { return std::exp(y); });
  CHECK((dec.fbar.f[0] - ex).sup_abs() < 1e-15);
  CHECK((dec.fbar.f[1] - ey).sup_abs() < 1e-15);
  CHECK(dec.fbar.f[2].sup_abs() == 0.0);
  CHECK((dec.fbar.H[0] - ex).sup_abs() < 5 * std::pow(g.max_spacing(), 2));
  CHECK(dec.fbar.H[2].sup_abs() == 0.0);
  CHECK(dec.fbar_inverted.f.at(o).isApprox(Eigen::Vector3d(0.5, 0.5, 0.0)));
  CHECK(dec.reconstruction.at(o).isApprox(Eigen::Vector3d(-2.0, -2.0, 0.0)));

  const auto r = apply_ribaucour(flat, d);
  for (int a = 0; a < 3; ++a)
    CHECK((dec.reconstruction[a] - r.f[a]).sup_abs() <= 1e-12 * std::max(1.0, r.f[a].sup_abs()));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK((dec.fbar_inverted.beta[i][j] - r.beta[i][j]).sup_abs() < 1e-12);
  CHECK((dec.fbar_inverted.H[0] * d.A() - dec.fbar.H[0]).sup_abs() < 1e-12);
}

TEST_CASE("enveloped sphere congruences") {
  const auto g = box();
  const auto six = sample(instantiate("six-sphere"), g);
  const auto d = induce_ribaucour_family(six, six, 0.3, middle(g));
  const auto r = apply_ribaucour(six, d);
  const auto R = sphere_radii(d);
  const VectorField fbar = d.gamma[0] * six.N[0] + d.gamma[1] * six.N[1] + d.gamma[2] * six.N[2];
  double sphere = 0.0, collinear = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Eigen::Vector3d step = r.f.at(p) - six.f.at(p);
    collinear = std::max(collinear, step.cross(fbar.at(p)).norm());
    for (int i = 0; i < 3; ++i) {
      const double Ri = R[i].values()[p];
      if (std::isnan(Ri)) continue;
      const Eigen::Vector3d center = six.f.at(p) + Ri * six.N[i].at(p);
      sphere = std::max(sphere, std::abs((r.f.at(p) - center).norm() - std::abs(Ri)) / std::max(1.0, std::abs(Ri)));
    }
  }
  CHECK(sphere < 1e-12);
  CHECK(collinear < 1e-12);
}

TEST_CASE("Bianchi's system on the flat chart") {
  const auto g = centered();
  const Node o = middle(g);
  const auto flat = sample(instantiate("flat-guichard"), g);
  const auto b = integrate_bianchi(flat, 1.0, {1, 1, 0}, {1, 1, 0}, o);
  double err = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto x = g.point(g.node(p));
    const double ex = std::exp(x[0]), ey = std::exp(x[1]);
    for (const auto* v : {&b.data.gamma, &b.data.gammabar})
      err = std::max({err, std::abs((*v)[0].values()[p] - ex), std::abs((*v)[1].values()[p] - ey),
                      std::abs((*v)[2].values()[p])});
  }
  CHECK(err <= 1e-8);
  CHECK((b.data.A() - b.data.Abar()).sup_abs() <= 1e-10);
  CHECK(b.path_dependence.pass);
  CHECK(b.metric.pass);
  CHECK(b.trace.pass);
  CHECK(chi_trace(b.fbar).at(o) == doctest::Approx(2.0));
  CHECK(norm2(b.fbar.f).at(o) == doctest::Approx(2.0));

  CHECK_THROWS_AS(integrate_bianchi(flat, 1.0, {1, 1, 0}, {1, 0, 0}, o), std::invalid_argument);
  CHECK_THROWS_AS(integrate_bianchi(flat, 1.0, {0, 0, 0}, {0, 0, 0}, o), std::invalid_argument);
  CHECK_THROWS_AS(integrate_bianchi(flat, 0.0, {1, 1, 0}, {1, 1, 0}, o), std::invalid_argument);
  const auto sph = sample(instantiate("spherical-control"), GridSpec({1, 0.6, 0}, {2, 1.4, 1}, {17, 17, 17}));
  CHECK_THROWS_AS(integrate_bianchi(sph, 1.0, {1, 1, 0}, {1, 1, 0}), CheckFailed);
}

TEST_CASE("Bianchi's system on the six-sphere") {
  double drift[2];
  int m = 0;
  for (int n : {17, 33}) {
    const auto g = box(n);
    const auto six = sample(instantiate("six-sphere"), g);
    const auto b = integrate_bianchi(six, 1.0, {1, 1, 0}, {1, 1, 0}, middle(g));
    CHECK(b.path_dependence.pass);
    CHECK(b.constraint.pass);
    CHECK(b.trace.pass);
    CHECK(b.metric.pass);
    drift[m++] = (b.data.A() - b.data.Abar()).sup_abs();
  }
  CHECK(order(drift[0], drift[1]) > 3.5);

  const auto g = box();
  const auto six = sample(instantiate("six-sphere"), g);
  const double a = 2.0;
  const Eigen::Vector3d gb(1.0, 0.5, 0.5);
  const Eigen::Vector3d gm(std::sqrt(1.0 + 0.25 - 0.25), 0.0, 0.0);
  const auto b = integrate_bianchi(six, a, gm, gb, middle(g));
  CHECK(b.path_dependence.pass);
  CHECK(b.trace.pass);
  CHECK(b.metric.pass);
}

TEST_CASE("Backlund transform") {
  const auto g = centered();
  const Node o = middle(g);
  const auto flat = sample(instantiate("flat-guichard"), g);
  const auto b = integrate_bianchi(flat, 1.0, {1, 1, 0}, {1, 1, 0}, o);
  CHECK(backlund_phi(flat.H, b.fbar, 1.0).at(o) == doctest::Approx(2.0));

  const auto r0 = backlund(flat, b.fbar, 1.0, 0.0);
  CHECK(r0.H[0].at(o) == doctest::Approx(-1.0));
  CHECK(r0.H[1].at(o) == doctest::Approx(-1.0));
  CHECK(r0.H[2].at(o) == doctest::Approx(kSqrt2));
  CHECK(r0.f.at(o).isApprox(Eigen::Vector3d(-2, -2, 0)));
  const auto [trace, diff] = check_guichard(r0);
  CHECK(trace.sup <= 1e-8);
  CHECK(diff.pass);
  for (const auto& r : r0.diagnostics) CHECK_MESSAGE(r.pass, r.name);
  CHECK(check_metric(r0).pass);
  CHECK(check_beta_consistency(r0).pass);

  const auto r1 = backlund(flat, b.fbar, 1.0, 1.0);
  CHECK(r1.H[0].at(o) == doctest::Approx(-2.0));
  CHECK(r1.H[1].at(o) == doctest::Approx(-2.0));
  CHECK(r1.H[2].at(o) == doctest::Approx(kSqrt2));
  CHECK(chi_trace(r1).at(o) == doctest::Approx(6.0));
  CHECK(check_backlund_trace(r1, flat, b.fbar, 1.0, 1.0).pass);
  CHECK_FALSE(check_backlund_trace(r1, flat, b.fbar, 1.0, 0.0).pass);

  // the same transform through induced Ribaucour data, phi pinned to 2 at the origin
  const auto via = apply_ribaucour(flat, induce_ribaucour_family(flat, b.fbar, 2.0, o));
  CHECK(via.f.at(o).isApprox(Eigen::Vector3d(-2, -2, 0)));
  CHECK(max_diff(via.f, r0.f) < 5 * std::pow(g.max_spacing(), 2));

  CHECK_THROWS_AS(backlund(flat, translated(b.fbar, {0.3, 0.0, 0.0}), 1.0, 0.0), CheckFailed);
  CHECK_THROWS_AS(backlund(flat, b.fbar, 2.0, 0.0), CheckFailed);
}

TEST_CASE("Backlund transforms of the Guichard catalog charts") {
  const auto g = box();
  const auto six = sample(instantiate("six-sphere"), g);
  const auto b = integrate_bianchi(six, 1.0, {1, 1, 0}, {1, 1, 0}, middle(g));
  for (const auto& sys : {six, sample(instantiate("six-sphere-dual", 0.0), g), sample(instantiate("six-sphere-dual", 1.0), g)}) {
    const auto r0 = backlund(sys, b.fbar, 1.0, 0.0);
    const auto [trace, diff] = check_guichard(r0);
    CHECK_MESSAGE(trace.pass, sys.provenance, " ", trace.sup);
    CHECK(trace.sup < 1e-5 * std::max(1.0, chi_trace(r0).sup_abs()));
    for (double lambda : {0.5, -2.0}) CHECK(check_backlund_trace(backlund(sys, b.fbar, 1.0, lambda), sys, b.fbar, 1.0, lambda, 1e-6).pass);
  }
  const auto r0 = backlund(six, b.fbar, 1.0, 0.0);
  for (const auto& r : r0.diagnostics) CHECK_MESSAGE(r.pass, r.name);
  CHECK(check_metric(r0).pass);
  CHECK(check_guichard(r0).second.pass);
  const auto flat = sample(instantiate("flat-guichard"), g);
  CHECK_THROWS_AS(backlund(flat, b.fbar, 1.0, 0.0), CheckFailed);
}

TEST_CASE("Backlund transform of a 1-system") {
  const auto g = box();
  const auto six = sample(instantiate("six-sphere"), g);
  const auto b = integrate_bianchi(six, 1.0, {1, 1, 0}, {1, 1, 0}, middle(g));
  const auto assoc = sample(instantiate("six-sphere-associated", 0.5), g);
  const auto r = backlund_lambda_system(assoc, b.fbar, 1.0);
  CHECK((chi_trace(r) - 1.0).sup_abs() < 1e-7);
  CHECK(check_metric(r).pass);

  const auto direct = backlund(six, b.fbar, 1.0, 0.0);
  const auto via = backlund_lambda_system(six, b.fbar, 1.0);
  CHECK(max_diff(via.f, direct.f) == 0.0);

  auto flat = sample(instantiate("flat-guichard"), centered());
  flat.H[2] = ScalarField(flat.grid());
  const auto bf = integrate_bianchi(sample(instantiate("flat-guichard"), centered()), 1.0, {1, 1, 0}, {1, 1, 0},
                                    middle(centered()));
  CHECK_THROWS_AS(backlund_lambda_system(flat, bf.fbar, 1.0), std::invalid_argument);
  const auto sph = sample(instantiate("spherical-control"), GridSpec({1, 0.6, 0}, {2, 1.4, 1}, {17, 17, 17}));
  CHECK_THROWS_AS(backlund_lambda_system(sph, bf.fbar, 1.0), std::invalid_argument);
}

TEST_CASE("permutability on the flat chart") {
  const auto g = centered();
  const Node o = middle(g);
  const auto flat = sample(instantiate("flat-guichard"), g);
  const auto b = integrate_bianchi(flat, 1.0, {1, 1, 0}, {1, 1, 0}, o);
  const auto a = build_associated(flat, 0.5, o);
  const auto dual = build_dual(flat, a.family, 0.5, o);
  const auto p = check_permutability(flat, a.system, dual, b.fbar, 1.0);
  REQUIRE(p.reports.size() == 6);
  for (const auto& r : p.reports) CHECK_MESSAGE(r.pass, r.name, " ", r.sup, " ", r.tolerance);
  CHECK(p.reports[1].name == "phi_product_relation");
  CHECK(p.reports[1].sup <= 5 * std::pow(g.max_spacing(), 2));
  CHECK(max_diff(p.transformed.f, backlund(flat, b.fbar, 1.0, 0.0).f) == 0.0);
  CHECK(check_guichard(p.transformed_dual).first.pass);
  CHECK((chi_trace(p.transformed_assoc) - 1.0).sup_abs() < 1e-10);

  CHECK_THROWS_AS(check_permutability(flat, a.system, dual, translated(b.fbar, {0.5, 0.5, 0.0}), 1.0), CheckFailed);
  CHECK_THROWS_AS(check_permutability(flat, a.system, a.system, b.fbar, 1.0), CheckFailed);
}

TEST_CASE("permutability on the six-sphere") {
  const auto g = box();
  const Node c = middle(g);
  const auto six = sample(instantiate("six-sphere"), g);
  const auto b = integrate_bianchi(six, 1.0, {1, 1, 0}, {1, 1, 0}, c);
  const auto a = build_associated(six, 0.5, c);
  const auto dual = build_dual(six, a.family, 0.5, c);
  const auto p = check_permutability(six, a.system, dual, b.fbar, 1.0);
  for (const auto& r : p.reports) CHECK_MESSAGE(r.pass, r.name, " ", r.sup, " ", r.tolerance);
}
