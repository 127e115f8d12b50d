#include <cmath>
#include <random>

#include "doctest.h"
#include "unit/fixtures.hpp"

#include "expanderlab/core.hpp"

using namespace expanderlab;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::usage;
}

}  // namespace

TEST_CASE("cone spec validation") {
  CHECK_NOTHROW(ConeSpec{2, 0.0}.validate());
  CHECK(kind_of([] { ConeSpec{1, 1.0}.validate(); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { ConeSpec{2, -0.1}.validate(); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { ConeSpec{2, NAN}.validate(); }) == ErrorKind::invalid_parameter);
  CHECK(ConeSpec{3, 0.0}.flat());
  CHECK(ConeSpec{2, 1.0}.link_polar_cosine() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("cone from link angle inverts the polar cosine") {
  CHECK(cone_from_link_angle(2, M_PI / 4).tau == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cone_from_link_angle(3, M_PI / 2).tau == 0.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.05, M_PI / 2);
  for (int i = 0; i < 50; ++i) {
    const double phi = angle(rng);
    const auto cone = cone_from_link_angle(2, phi);
    CHECK(std::acos(cone.link_polar_cosine()) == doctest::Approx(phi).epsilon(1e-12));
  }
  CHECK(kind_of([] { cone_from_link_angle(2, 0.0); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { cone_from_link_angle(2, 2.0); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("radial grid construction") {
  const auto g = make_radial_grid(64, 10.0, 1.0);
  CHECK(g.size() == 65);
  CHECK(g.intervals() == 64);
  CHECK(g[0] == 0.0);
  CHECK(g.r_max() == 10.0);
  CHECK(g.min_spacing() == doctest::Approx(g.max_spacing()));

  const auto s = make_radial_grid(100, 40.0, 1.02);
  CHECK(s.r_max() == 40.0);
  for (Eigen::Index i = 2; i < s.size() - 1; ++i)
    CHECK((s[i] - s[i - 1]) / (s[i - 1] - s[i - 2]) == doctest::Approx(1.02).epsilon(1e-9));

  CHECK(kind_of([] { make_radial_grid(8, 1.0, 1.0); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { make_radial_grid(32, -1.0, 1.0); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { make_radial_grid(32, 1.0, 0.9); }) == ErrorKind::invalid_parameter);

  Vector bad = Vector::LinSpaced(20, 0.0, 1.0);
  bad[5] = bad[4];
  CHECK(kind_of([&] { RadialGrid(bad, 1.0); }) == ErrorKind::invalid_parameter);
  Vector shifted = Vector::LinSpaced(20, 0.1, 1.0);
  CHECK(kind_of([&] { RadialGrid(shifted, 1.0); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("locate finds the containing interval") {
  const auto g = make_radial_grid(32, 4.0, 1.0);
  CHECK(g.locate(0.0) == 0);
  CHECK(g.locate(0.2) == 1);
  CHECK(g.locate(4.0) == 31);
  CHECK(g.locate(100.0) == 31);
}

TEST_CASE("hermite interpolation reproduces cubics") {
  const auto g = make_radial_grid(40, 3.0, 1.05);
  Vector u(g.size()), du(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double r = g[i];
    u[i] = r * r * r - 2.0 * r * r + 1.0;
    du[i] = 3.0 * r * r - 4.0 * r;
  }
  const Profile p(g, u, du);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> where(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double r = where(rng);
    CHECK(p.height_at(r) == doctest::Approx(r * r * r - 2 * r * r + 1).epsilon(1e-12));
    CHECK(p.slope_at(r) == doctest::Approx(3 * r * r - 4 * r).epsilon(1e-11));
  }
  CHECK(kind_of([&] { (void)p.height_at(3.5); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("profile invariants") {
  const auto g = make_radial_grid(16, 1.0, 1.0);
  Vector u = Vector::Zero(g.size()), du = Vector::Zero(g.size());
  CHECK_NOTHROW(Profile(g, u, du));
  Vector tilt = du;
  tilt[0] = 0.5;
  CHECK(kind_of([&] { Profile(g, u, tilt); }) == ErrorKind::invalid_parameter);
  Vector nan = u;
  nan[3] = NAN;
  CHECK(kind_of([&] { Profile(g, nan, du); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([&] { Profile(g, Vector::Zero(5), du); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("cone profile marks the vertex as singular") {
  const auto p = cone_profile({2, 1.5}, make_radial_grid(32, 8.0, 1.0));
  CHECK(p.meta().singular_axis);
  CHECK(p.meta().kind == ProfileKind::cone);
  CHECK(p.du()[0] == 0.0);
  CHECK(p.du()[5] == 1.5);
  // the secant replaces the conventional vertex slope
  CHECK(p.height_at(0.1) == doctest::Approx(0.15).epsilon(1e-14));
  CHECK_FALSE(cone_profile({2, 0.0}, make_radial_grid(32, 8.0, 1.0)).meta().singular_axis);
}

TEST_CASE("profile kind names round trip") {
  for (auto k : {ProfileKind::sampled, ProfileKind::cone, ProfileKind::expander, ProfileKind::flow})
    CHECK(profile_kind_from_string(to_string(k)) == k);
  CHECK(kind_of([] { profile_kind_from_string("torus"); }) == ErrorKind::unknown_kind);
}

TEST_CASE("profile from values differentiates") {
  const auto g = make_radial_grid(256, 2.0, 1.0);
  Vector u = g.nodes().array().square();
  const auto p = profile_from_values(g, u);
  CHECK(p.du()[0] == 0.0);
  CHECK((p.du() - 2.0 * g.nodes()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("weighted norm") {
  const auto& f = fixtures()["weighted_norm_linear"];
  const auto p = cone_profile({2, 1.0}, make_radial_grid(f["N"], f["r_max"], 1.0));
  CHECK(weighted_norm(p, {1.0, 0}) == doctest::Approx(f["value"].get<double>()).epsilon(1e-12));
  CHECK(weighted_norm(p, {1.0, 0}) < f["limit"].get<double>());

  const auto plane = cone_profile({2, 0.0}, make_radial_grid(64, 10.0, 1.0));
  for (int l : {0, 1, 2}) CHECK(weighted_norm(plane, {0.5, l}) == 0.0);
  CHECK(kind_of([&] { weighted_norm(plane, {0.0, 3}); }) == ErrorKind::invalid_parameter);

  // a field over a fixed base: |f| = 1 weighted by (|x| + 1)^0
  const Vector ones = Vector::Ones(plane.size());
  CHECK(weighted_norm(ones, Vector::Zero(plane.size()), plane, {0.0, 1}) == 1.0);
}

TEST_CASE("trace at infinity removes the first two corrections exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tau_d(0.0, 3.0), c_d(-2.0, 2.0);
  const auto g = make_radial_grid(512, 40.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double tau = tau_d(rng), c = c_d(rng), d = c_d(rng);
    Vector u(g.size()), du(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double r = std::max(g[i], 1.0);
      u[i] = tau * r + c / r + d / (r * r * r);
      du[i] = g[i] < 1.0 ? 0.0 : tau - c / (r * r) - 3 * d / (r * r * r * r);
    }
    const auto t = trace_at_infinity(Profile(g, u, du));
    CHECK(t.tau == doctest::Approx(tau).epsilon(1e-12));
    CHECK(t.converged);
  }
  CHECK(kind_of([] { trace_at_infinity(cone_profile({2, 1.0}, make_radial_grid(32, 5.0, 1.0))); }) ==
        ErrorKind::invalid_parameter);
}

TEST_CASE("homogeneous extension") {
  CHECK(homogeneous_extension(2.0, 1.0, 3.0) == 6.0);
  CHECK(homogeneous_extension(2.0, -1.0, 4.0) == 0.5);
  CHECK(kind_of([] { homogeneous_extension(1.0, 1.0, 0.0); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("error kinds carry names") {
  const Error e(ErrorKind::bracket_failure, "x");
  CHECK(std::string(e.what()) == "bracket-failure: x");
  CHECK(to_string(ErrorKind::quadrature_tolerance) == "quadrature-tolerance-not-met");
}
