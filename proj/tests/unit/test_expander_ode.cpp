#include <cmath>
#include <random>

#include "doctest.h"
#include "unit/fixtures.hpp"

#include "expanderlab/expander_ode.hpp"

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

// u = tau r + c / r + d / r^3 beyond r = 1, flat inside (only the tail matters)
Profile tail_profile(double tau, double c, double r_max) {
  const RadialGrid g = make_radial_grid(4096, r_max, 1.0);
  Vector u(g.size()), du(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double r = std::max(g[i], g[1]);
    u[i] = tau * r + c / r;
    du[i] = i == 0 ? 0.0 : tau - c / (r * r);
  }
  return Profile(g, u, du);
}

}  // namespace

TEST_CASE("residual vanishes on the plane and matches direct substitution on the cone") {
  const auto g = make_radial_grid(256, 8.0, 1.0);
  const auto plane = cone_profile({2, 0.0}, g);
  CHECK(expander_residual(plane, 2).cwiseAbs().maxCoeff() == 0.0);
  const auto cone = cone_profile({2, 1.0}, g);
  const Vector R = expander_residual(cone, 2);
  const Eigen::Index at_one = 32;
  REQUIRE(g[at_one] == doctest::Approx(1.0));
  CHECK(R[at_one] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("axis curvature") {
  for (const auto& e : fixtures()["axis_curvature"]) {
    const int n = e["n"];
    const double a = e["a"];
    CHECK(expander_second_derivative(n, 0.0, a, 0.0) == doctest::Approx(e["upp0"].get<double>()).epsilon(1e-15));
    const auto p = integrate_profile(n, a, make_radial_grid(4096, 10.0, 1.0));
    const double h = p.r()[1];
    const double fd = 2.0 * (p.u()[1] - p.u()[0]) / (h * h);
    CHECK(fd == doctest::Approx(e["upp0"].get<double>()).epsilon(1e-4));
  }
}

TEST_CASE("integrated profiles solve the equation and are monotone") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> a_d(0.1, 4.0);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 3;
    const double a = a_d(rng);
    const auto p = integrate_profile(n, a, make_radial_grid(2048, 40.0, 1.0));
    CHECK(p.meta().kind == ProfileKind::expander);
    CHECK(p.meta().expander_dim == n);
    CHECK(p.u()[0] == a);
    CHECK(expander_residual(p, n).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(p.du().minCoeff() >= 0.0);
  }
}

TEST_CASE("small axis heights stay close to the plane") {
  double prev = 0.0;
  for (double a : {1e-1, 1e-2, 1e-3}) {
    const auto p = integrate_profile(2, a, make_radial_grid(512, 20.0, 1.0));
    double sup = 0.0;
    for (Eigen::Index i = 0; p.r()[i] <= 1.0; ++i) sup = std::max(sup, p.u()[i]);
    const double C = sup / a;
    CHECK(C < 1.2);
    if (prev > 0.0) CHECK(C == doctest::Approx(prev).epsilon(0.01));
    prev = C;
  }
}

TEST_CASE("integrator errors") {
  const auto g = make_radial_grid(64, 10.0, 1.0);
  CHECK(kind_of([&] { integrate_profile(2, 0.0, g); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([&] { integrate_profile(1, 1.0, g); }) == ErrorKind::invalid_parameter);
  IntegrateOptions capped;
  capped.slope_cap = 0.5;
  CHECK(kind_of([&] { integrate_profile(2, 3.0, g, capped); }) == ErrorKind::blow_up);
  IntegrateOptions starved;
  starved.max_steps = 3;
  CHECK(kind_of([&] { integrate_profile(2, 1.0, make_radial_grid(16, 40.0, 1.0), starved); }) ==
        ErrorKind::step_underflow);
}

TEST_CASE("slope map agrees with the frozen scan and increases") {
  const auto g = make_radial_grid(2048, 40.0, 1.0);
  double prev = 0.0;
  for (const auto& e : fixtures()["slope_scan_n2"]) {
    const double s = shooting_slope(2, e["a"], g);
    CHECK(s == doctest::Approx(e["slope"].get<double>()).epsilon(1e-7));
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("shooting recovers the frozen axis heights") {
  for (const auto& e : fixtures()["axis_height"]) {
    const int n = e["n"];
    const double tau = e["tau"];
    const auto r = shoot(n, tau);
    CHECK(r.a == doctest::Approx(e["a"].get<double>()).epsilon(1e-9));
    CHECK(r.residual_sup < 1e-8);
    CHECK(r.slope_error <= 1e-10);
    CHECK(std::abs(trace_at_infinity(r.profile).tau - tau) <= 1e-9);
    CHECK(r.profile.meta().cone == ConeSpec{n, tau});
    CHECK(r.scan.size() == 10);
  }
}

TEST_CASE("flat cone gives the plane") {
  const auto r = shoot(3, 0.0);
  CHECK(r.a == 0.0);
  CHECK(r.profile.u().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coarse and fine scans locate the same root") {
  ShootOptions fine;
  fine.scan_refine = 4;
  const double a1 = shoot(2, 0.7).a;
  const double a2 = shoot(2, 0.7, fine).a;
  CHECK(std::abs(a1 - a2) < 1e-9);
}

TEST_CASE("axis height decreases to zero with the slope") {
  double prev = INFINITY;
  for (double tau = 1.0; tau > 1e-3; tau *= 0.5) {
    const double a = shoot(2, tau).a;
    CHECK(a < prev);
    prev = a;
  }
  CHECK(prev < 5e-3);
}

TEST_CASE("bracket failure reports the scan") {
  ShootOptions narrow;
  narrow.scan_lo = -6;
  narrow.scan_hi = -4;
  try {
    shoot(2, 1.0, narrow);
    FAIL("expected bracket failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::bracket_failure);
    CHECK(std::string(e.what()).find("scan (a, slope - tau)") != std::string::npos);
  }
  CHECK(kind_of([] { shoot(2, -1.0); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("decay constant") {
  for (const auto& e : fixtures()["decay_constant"]) {
    const double tau = e["tau"];
    const auto p = tail_profile(tau, e["c"], e["r_max"]);
    CHECK(decay_constant(p, {2, tau}) == doctest::Approx(e["M"].get<double>()).epsilon(1e-9));
  }
  const auto cone = cone_profile({2, 1.0}, make_radial_grid(512, 40.0, 1.0));
  CHECK(decay_constant(cone, {2, 1.0}) == 0.0);
  CHECK(kind_of([&] { decay_constant(cone, {2, 2.0}); }) == ErrorKind::trace_mismatch);

  const auto sol = shoot(2, 1.0);
  const double m = decay_constant(sol.profile, {2, 1.0});
  CHECK(std::isfinite(m));
  CHECK(m > 0.0);
}
