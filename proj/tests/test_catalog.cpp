#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "orthonet/catalog.hpp"

using namespace orthonet;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const Eigen::Vector3d kOne(1, 1, 1);

double trace(const std::array<double, 3>& H) { return H[0] * H[0] + H[1] * H[1] - H[2] * H[2]; }

}  // namespace

TEST_CASE("registry") {
  const auto names = chart_names();
  CHECK(names.size() == 5);
  CHECK(instantiate("six_sphere").name() == "six-sphere");
  CHECK(instantiate("six-sphere-dual", 1.0).provenance() == "six-sphere-dual(c=1)");
  CHECK_THROWS_AS(instantiate("confocal-quadrics"), std::invalid_argument);
  const auto j = to_json(list_charts().at(1));
  CHECK(j["classification"] == "guichard");
}

TEST_CASE("closed-form point values at (1,1,1)") {
  const auto H = instantiate("six-sphere").lame(kOne);
  CHECK(H[0] == doctest::Approx(0.25));
  CHECK(H[1] == doctest::Approx(0.25));
  CHECK(H[2] == doctest::Approx(0.3535534));

  const auto b = instantiate("six-sphere").rotational(kOne);
  CHECK(b(0, 1) == doctest::Approx(-0.5));
  CHECK(b(0, 2) == doctest::Approx(-0.7071068));
  CHECK(b(2, 0) == doctest::Approx(-0.7071068));

  const auto A = instantiate("six-sphere-associated", 0.0).lame(kOne);
  CHECK(A[0] == doctest::Approx(0.7071068));
  CHECK(A[1] == doctest::Approx(-0.7071068));
  CHECK(A[2] == doctest::Approx(0.0));

  const auto S = instantiate("six-sphere-dual", 0.0).lame(kOne);
  CHECK(S[0] == doctest::Approx(2.0));
  CHECK(S[1] == doctest::Approx(2.0));
  CHECK(S[2] == doctest::Approx(-2 * kSqrt2));

  const auto S1 = instantiate("six-sphere-dual", 1.0).lame(kOne);
  CHECK(S1[0] == doctest::Approx(0.33579).epsilon(1e-4));
  CHECK(S1[1] == doctest::Approx(3.16421).epsilon(1e-4));
  CHECK(S1[2] == doctest::Approx(-3.18198).epsilon(1e-4));

  CHECK(instantiate("spherical-control").lame({2.0, std::acos(0.0), 0.3})[2] == doctest::Approx(2.0));
}

TEST_CASE("trace identities at random points") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (double c : {-1.0, 0.0, 1.0}) {
    const auto assoc = instantiate("six-sphere-associated", c);
    const auto dual = instantiate("six-sphere-dual", c);
    for (int t = 0; t < 10; ++t) {
      const Eigen::Vector3d p(u(rng), u(rng), u(rng));
      CHECK(std::abs(trace(assoc.lame(p)) - 1.0) < 1e-12);
      CHECK(std::abs(trace(dual.lame(p))) < 1e-12);
      CHECK(std::abs(trace(instantiate("six-sphere").lame(p))) < 1e-12);
    }
  }
}

TEST_CASE("printed dual coefficient violates the Guichard condition") {
  auto H = instantiate("six-sphere-dual", 0.0).lame(kOne);
  H[2] = six_sphere_dual_printed_h3(kOne, 0.0);
  CHECK(trace(H) == doctest::Approx(-24.0));
}

TEST_CASE("exact derivatives match the frame") {
  const auto chart = instantiate("six-sphere");
  const Eigen::Vector3d p(0.7, 1.2, 0.9);
  const Eigen::Matrix3d N = chart.frame(p);
  CHECK((N * N.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  CHECK(N.determinant() == doctest::Approx(1.0));
  const auto sph = instantiate("spherical-control").frame({1.5, 1.0, 0.5});
  CHECK(sph.determinant() == doctest::Approx(1.0));
}

TEST_CASE("sampled charts pass the tos checks") {
  const auto g = GridSpec::cube(0.5, 1.5, 17);
  for (const char* name : {"six-sphere", "flat-guichard"}) {
    const auto sys = sample(instantiate(name), g);
    CHECK(check_orthogonality(sys).pass);
    CHECK(check_metric(sys).pass);
    CHECK(check_frame_orthonormality(sys).sup < 1e-14);
    const auto [f1, f2] = check_frame_system(sys);
    CHECK(f1.pass);
    CHECK(f2.pass);
    CHECK(check_beta_consistency(sys).pass);
    CHECK(check_determinant(sys).pass);
    CHECK(classify_chi(sys).kind == ChiKind::Guichard);
  }
  const auto assoc = sample(instantiate("six-sphere-associated", 0.5), g);
  REQUIRE(assoc.anchor);
  CHECK(check_metric(assoc).pass);
  CHECK(check_beta_consistency(assoc).pass);
  const auto k = classify_chi(assoc);
  CHECK(k.kind == ChiKind::ConstantTrace);
  CHECK(k.constant == doctest::Approx(1.0));
  CHECK(assoc.f.at(Node{0, 0, 0}).norm() == 0.0);
  const auto dual = sample(instantiate("six-sphere-dual", 1.0), g);
  CHECK(check_metric(dual).pass);
  CHECK(classify_chi(dual).kind == ChiKind::Guichard);
}

TEST_CASE("six-sphere is the inverted flat chart") {
  const auto g = GridSpec::cube(0.5, 1.5, 9);
  const auto inv = invert_system(sample(instantiate("flat-guichard"), g));
  const auto six = sample(instantiate("six-sphere"), g);
  for (int i = 0; i < 3; ++i) {
    CHECK((inv.H[i].values() - six.H[i].values()).abs().maxCoeff() < 1e-14);
    for (int j = 0; j < 3; ++j) CHECK((inv.beta[i][j].values() - six.beta[i][j].values()).abs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("domain violations") {
  CHECK_THROWS_AS(sample(instantiate("six-sphere"), GridSpec::cube(-1.0, 1.0, 5)), std::domain_error);
  CHECK_THROWS_AS(sample(instantiate("spherical-control"), GridSpec::cube(0.0, 1.0, 5)), std::domain_error);
}
