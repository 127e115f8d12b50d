#include <cmath>

#include "doctest.h"

#include "expanderlab/analysis.hpp"
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

Profile graph_of(const RadialGrid& g, auto&& u, auto&& du) {
  Vector a(g.size()), b(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    a[i] = u(g[i]);
    b[i] = du(g[i]);
  }
  return Profile(g, a, b);
}

const ShootingResult& expander() {
  static const ShootingResult r = shoot(2, 1.0);
  return r;
}

}  // namespace

TEST_CASE("lower spherical cap is umbilic") {
  const double R = 2.0;
  const auto g = make_radial_grid(1024, 1.0, 1.0);
  const auto cap = graph_of(
      g, [&](double r) { return -std::sqrt(R * R - r * r); }, [&](double r) { return r / std::sqrt(R * R - r * r); });
  for (int n : {2, 3}) {
    const auto s = curvatures(cap, n);
    CHECK(s.method == "finite-differences");
    for (Eigen::Index i = 0; i + 4 < g.size(); ++i) {
      CHECK(s.kappa_m[i] == doctest::Approx(1.0 / R).epsilon(1e-6));
      CHECK(s.kappa_p[i] == doctest::Approx(1.0 / R).epsilon(1e-6));
      CHECK(s.ratio()[i] == doctest::Approx(1.0 / n).epsilon(1e-5));
    }
  }
}

TEST_CASE("cone away from the vertex") {
  const auto g = make_radial_grid(256, 10.0, 1.0);
  const auto s = curvatures(cone_profile({3, 1.0}, g), 3);
  for (Eigen::Index i = 4; i < g.size(); ++i) {
    CHECK(std::abs(s.kappa_m[i]) < 1e-12);
    CHECK(s.kappa_p[i] == doctest::Approx(1.0 / (g[i] * std::sqrt(2.0))));
  }
}

TEST_CASE("expanders take u'' from the equation and pass the identities") {
  const auto& sol = expander();
  const auto s = curvatures(sol.profile, 2);
  CHECK(s.method == "ode");
  CHECK(curvatures(sol.profile, 2, false).method == "finite-differences");
  CHECK(s.H.minCoeff() > 0.0);
  CHECK(mean_convexity_check(sol.profile, 2).pass);
  CHECK(h_identity_check(sol.profile, 2).pass);
  CHECK(drift_H_residual(sol.profile, 2).pass);
  CHECK(ratio_subsolution_check(sol.profile, 2).pass);
  const auto cb = curvature_ratio_bound(sol.profile, {2, 1.0}, 2);
  CHECK(cb.pass);
  CHECK(cb.name == "curvature_ratio_bound");
}

TEST_CASE("mean concave surfaces violate the hypothesis") {
  const auto g = make_radial_grid(256, 4.0, 1.0);
  const auto bowl = graph_of(g, [](double r) { return -r * r; }, [](double r) { return -2 * r; });
  CHECK_FALSE(mean_convexity_check(bowl, 2).pass);
  CHECK(kind_of([&] { ratio_subsolution_check(bowl, 2); }) == ErrorKind::hypothesis_violation);
}

TEST_CASE("graph windows") {
  const auto g = make_radial_grid(512, 10.0, 1.0);
  const auto plane = cone_profile({2, 0.0}, g);
  CHECK(graph_window_check(plane, 2, 100, 1e-3, 2.0));
  CHECK(kind_of([&] { graph_window_check(plane, 2, 100, 1e-3, 100.0); }) == ErrorKind::window_escapes_grid);
  CHECK(kind_of([&] { graph_window_check(plane, 2, 512, 1e-3, 1.0); }) == ErrorKind::invalid_parameter);

  // a cone is not flat on the scale of its distance to the vertex
  const auto cone = cone_profile({2, 1.0}, g);
  CHECK_FALSE(graph_window_check(cone, 2, 10, 0.1, 1.0));
  CHECK(graph_window_check(cone, 2, 400, 0.1, 0.5));

  // the expander is smooth, so small windows are flat
  const auto& sol = expander();
  CHECK(graph_window_check(sol.profile, 2, 0, 0.1, 0.1));
}

TEST_CASE("refinement study reports the observed order") {
  const auto rep = refinement_study([](int N) { return CheckReport::make("fake", 1.0 / (double(N) * N), 1.0); });
  CHECK(rep.order_estimate == doctest::Approx(2.0));
  CHECK(rep.sup_residual == doctest::Approx(1.0 / (2048.0 * 2048.0)));
  CHECK(rep.note.find("sups") != std::string::npos);
}
