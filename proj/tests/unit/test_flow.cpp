#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "unit/fixtures.hpp"

#include "expanderlab/expander_ode.hpp"
#include "expanderlab/flow.hpp"

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

TEST_CASE("mollified cone") {
  const auto g = make_radial_grid(64, 10.0, 1.0);
  const auto p = mollified_cone(2.0, 0.25, g);
  CHECK(p.u()[0] == doctest::Approx(1.0));
  CHECK(p.du()[0] == 0.0);
  CHECK(p.u()[64] == doctest::Approx(2.0 * std::sqrt(100.25)));
  CHECK(p.du()[64] == doctest::Approx(2.0 * 10.0 / std::sqrt(100.25)));
  CHECK(p.meta().kind == ProfileKind::flow);
  CHECK(kind_of([&] { mollified_cone(0.0, 0.1, g); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([&] { mollified_cone(1.0, 0.0, g); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("boundary names") {
  CHECK(boundary_from_string("dirichlet") == Boundary::dirichlet);
  CHECK(boundary_from_string(to_string(Boundary::neumann)) == Boundary::neumann);
  CHECK(kind_of([] { boundary_from_string("periodic"); }) == ErrorKind::unknown_kind);
}

TEST_CASE("speed of a paraboloid") {
  const auto g = make_radial_grid(400, 2.0, 1.02);
  const Vector r = g.nodes();
  const Vector u = r.array().square().matrix();
  for (int n : {2, 3}) {
    const Vector s = mcf_speed(g, u, n);
    CHECK(s[0] == doctest::Approx(2.0 * n).epsilon(1e-12));
    for (Eigen::Index i = 1; i + 1 < g.size(); ++i) {
      const double exact = 2.0 / (1.0 + 4 * r[i] * r[i]) + 2.0 * (n - 1);
      CHECK(s[i] == doctest::Approx(exact).epsilon(1e-9));
    }
    CHECK(std::isnan(s[g.size() - 1]));
  }
}

TEST_CASE("plane is stationary under both boundary conditions") {
  const auto plane = cone_profile({2, 0.0}, make_radial_grid(128, 10.0, 1.0));
  for (auto b : {Boundary::dirichlet, Boundary::neumann}) {
    FlowParams fp;
    fp.boundary = b;
    const auto s = evolve_radial_mcf(plane, 2, 0.5, fp);
    CHECK(s.t == 0.5);
    CHECK(s.profile.u().cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.cfl <= fp.cfl + 1e-12);
  }
}

TEST_CASE("expanders move self-similarly") {
  ShootOptions so;
  so.nodes = 1024;
  const auto sol = shoot(2, 1.0, so);
  const auto s = evolve_radial_mcf(sol.profile, 2, 1.0);
  // u(t, r) = sqrt(1 + t) U(r / sqrt(1 + t))
  double err = 0.0;
  const auto& g = sol.profile.grid();
  for (Eigen::Index i = 0; g[i] <= 0.5 * g.r_max(); ++i)
    err = std::max(err, std::abs(s.profile.u()[i] - std::sqrt(2.0) * sol.profile.height_at(g[i] / std::sqrt(2.0))));
  CHECK(err < 2e-3);
  CHECK(s.min_speed > 0.0);
}

TEST_CASE("flow of the mollified cone stays mean convex and self-similar defect is small") {
  const auto g = make_radial_grid(1024, 40.0, 1.0);
  const std::vector<double> times{0.5, 1.0};
  const auto states = evolve_radial_mcf(mollified_cone(1.0, 1e-2, g), 2, times);
  REQUIRE(states.size() == 2);
  CHECK(states[0].t == 0.5);
  CHECK(states[1].steps > states[0].steps);
  CHECK(states[1].min_speed >= 0.0);
  CHECK(self_similarity_defect(states[0], states[1]) < 2e-2);
  CHECK(kind_of([&] { self_similarity_defect(states[1], states[0]); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("flow errors") {
  const auto u0 = mollified_cone(1.0, 1e-2, make_radial_grid(128, 10.0, 1.0));
  const std::vector<double> bad{0.5, 0.2};
  CHECK(kind_of([&] { evolve_radial_mcf(u0, 2, bad); }) == ErrorKind::invalid_parameter);
  FlowParams wild;
  wild.cfl = 1.5;
  CHECK(kind_of([&] { evolve_radial_mcf(u0, 2, 0.1, wild); }) == ErrorKind::invalid_parameter);
  FlowParams capped;
  capped.slope_cap = 0.5;
  CHECK(kind_of([&] { evolve_radial_mcf(u0, 2, 0.1, capped); }) == ErrorKind::slope_cap_exceeded);
  FlowParams impatient;
  impatient.dt_min = 1.0;
  CHECK(kind_of([&] { evolve_radial_mcf(u0, 2, 0.1, impatient); }) == ErrorKind::cfl_underflow);
}

TEST_CASE("link flow closed form") {
  for (const auto& e : fixtures()["link_flow"]) {
    const int n = e["n"];
    const double theta0 = e["theta0"], t = e["t"];
    CHECK(std::cos(link_sphere_flow(n, theta0, t).theta) == doctest::Approx(e["cos_theta"].get<double>()).epsilon(1e-14));
    CHECK(link_extinction_time(n, theta0) == doctest::Approx(e["extinction"].get<double>()).epsilon(1e-14));
  }
  CHECK(std::isinf(link_extinction_time(3, M_PI / 2)));
  CHECK(link_sphere_flow(3, M_PI / 2, 5.0).theta == M_PI / 2);
  CHECK(kind_of([] { link_sphere_flow(2, 1.0, 10.0); }) == ErrorKind::past_extinction);
  CHECK(kind_of([] { link_sphere_flow_integrated(2, 1.0, 10.0); }) == ErrorKind::past_extinction);
  CHECK(kind_of([] { link_extinction_time(2, 0.0); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("integrated link flow matches the closed form") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> theta_d(0.1, 1.5), frac(0.0, 0.95);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4;
    const double theta0 = theta_d(rng);
    const double t = frac(rng) * link_extinction_time(n, theta0);
    const double exact = std::cos(link_sphere_flow(n, theta0, t).theta);
    CHECK(std::cos(link_sphere_flow_integrated(n, theta0, t).theta) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("pinching margin") {
  for (const auto& e : fixtures()["pinching_margin"]) {
    LinkState link;
    link.n = e["n"];
    link.theta = e["theta"];
    const auto pc = pinching_check(link);
    CHECK(pc.margin == doctest::Approx(e["margin"].get<double>()).epsilon(1e-12));
    CHECK(pc.holds);
  }
  LinkState flat;
  flat.n = 2;
  flat.theta = 0.4;
  CHECK(std::isinf(pinching_check(flat).margin));
  flat.theta = 0.0;
  CHECK(kind_of([&] { pinching_check(flat); }) == ErrorKind::invalid_parameter);
}
