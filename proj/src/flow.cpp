#include "expanderlab/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "expanderlab/differentiate.hpp"

namespace expanderlab {

Profile mollified_cone(double tau, double eps, const RadialGrid& grid) {
  require(tau > 0.0 && std::isfinite(tau), ErrorKind::invalid_parameter, "tau must be > 0");
  require(eps > 0.0 && std::isfinite(eps), ErrorKind::invalid_parameter, "eps must be > 0");
  const Vector& r = grid.nodes();
  const Vector root = (r.array().square() + eps).sqrt();
  Vector u = tau * root;
  Vector du = (tau * r.array() / root.array()).matrix();
  du[0] = 0.0;
  ProfileMeta meta;
  meta.kind = ProfileKind::flow;
  meta.time = 0.0;
  return Profile(grid, std::move(u), std::move(du), meta);
}

std::string_view to_string(Boundary b) { return b == Boundary::dirichlet ? "dirichlet" : "neumann"; }

Boundary boundary_from_string(std::string_view name) {
  if (name == "dirichlet") return Boundary::dirichlet;
  if (name == "neumann") return Boundary::neumann;
  throw Error(ErrorKind::unknown_kind, "boundary mode '" + std::string(name) + "'");
}

namespace {

// Nonuniform 3-point first and second derivatives at interior node i.
struct Stencil {
  double d1m, d10, d1p;
  double d2m, d20, d2p;
};

std::vector<Stencil> make_stencils(const RadialGrid& g) {
  std::vector<Stencil> out(g.size());
  for (Eigen::Index i = 1; i + 1 < g.size(); ++i) {
    const double hm = g[i] - g[i - 1], hp = g[i + 1] - g[i];
    out[i].d1m = -hp / (hm * (hm + hp));
    out[i].d10 = (hp - hm) / (hm * hp);
    out[i].d1p = hm / (hp * (hm + hp));
    out[i].d2m = 2.0 / (hm * (hm + hp));
    out[i].d20 = -2.0 / (hm * hp);
    out[i].d2p = 2.0 / (hp * (hm + hp));
  }
  return out;
}

struct Rates {
  double max_slope = 0.0;
  double dt_limit = std::numeric_limits<double>::infinity();
};

// Fills speed[0..N-1] (interior plus axis); returns slope and stability data.
Rates evaluate(const RadialGrid& g, const std::vector<Stencil>& st, const Vector& u, int n,
               double neumann_slope, bool neumann, Vector& speed) {
  const Eigen::Index N = g.size() - 1;
  Rates rates;
  const double h0 = g[1];
  speed[0] = n * 2.0 * (u[1] - u[0]) / (h0 * h0);
  rates.dt_limit = h0 * h0 / (2.0 * n);
  for (Eigen::Index i = 1; i < N; ++i) {
    const auto& s = st[i];
    const double du = s.d1m * u[i - 1] + s.d10 * u[i] + s.d1p * u[i + 1];
    const double d2u = s.d2m * u[i - 1] + s.d20 * u[i] + s.d2p * u[i + 1];
    const double diff = 1.0 / (1.0 + du * du);
    speed[i] = diff * d2u + (n - 1) * du / g[i];
    rates.max_slope = std::max(rates.max_slope, std::abs(du));
    const double h = std::min(g[i] - g[i - 1], g[i + 1] - g[i]);
    rates.dt_limit = std::min(rates.dt_limit, h * h / (2.0 * diff));
  }
  if (neumann) {
    // ghost node reflecting the prescribed slope
    const double h = g[N] - g[N - 1];
    const double ghost = u[N - 1] + 2.0 * h * neumann_slope;
    const double du = neumann_slope;
    const double d2u = (u[N - 1] - 2.0 * u[N] + ghost) / (h * h);
    speed[N] = d2u / (1.0 + du * du) + (n - 1) * du / g[N];
    rates.dt_limit = std::min(rates.dt_limit, h * h * (1.0 + du * du) / 2.0);
  } else {
    speed[N] = 0.0;
  }
  return rates;
}

FlowState snapshot(const Profile& u0, const Vector& u, double t) {
  Vector du = differentiate(u0.grid(), u, Parity::even);
  du[0] = 0.0;
  ProfileMeta meta = u0.meta();
  meta.kind = ProfileKind::flow;
  meta.time = t;
  FlowState s;
  s.t = t;
  s.profile = Profile(u0.grid(), u, std::move(du), meta);
  return s;
}

}  // namespace

Vector mcf_speed(const RadialGrid& grid, const Vector& u, int n) {
  Vector speed(grid.size());
  evaluate(grid, make_stencils(grid), u, n, 0.0, false, speed);
  speed[grid.size() - 1] = std::numeric_limits<double>::quiet_NaN();
  return speed;
}

std::vector<FlowState> evolve_radial_mcf(const Profile& u0, int n, std::span<const double> times,
                                         const FlowParams& params) {
  require(n >= 2, ErrorKind::invalid_parameter, "n must be >= 2");
  require(!times.empty(), ErrorKind::invalid_parameter, "no output times requested");
  require(params.cfl > 0.0 && params.cfl <= 1.0, ErrorKind::invalid_parameter,
          "cfl must lie in (0, 1]");
  for (std::size_t k = 0; k < times.size(); ++k)
    require(times[k] > 0.0 && (k == 0 || times[k] > times[k - 1]), ErrorKind::invalid_parameter,
            "output times must be positive and increasing");

  const RadialGrid& g = u0.grid();
  const auto st = make_stencils(g);
  const bool neumann = params.boundary == Boundary::neumann;
  const double slope_bc = std::isnan(params.neumann_slope) ? u0.du()[g.size() - 1] : params.neumann_slope;

  Vector u = u0.u();
  Vector speed(g.size());
  std::vector<FlowState> out;
  double t = 0.0, dt_min_seen = std::numeric_limits<double>::infinity(), max_slope = 0.0;
  double min_speed = std::numeric_limits<double>::infinity();
  double dt = 0.0, ratio = 0.0;
  long steps = 0;

  for (double target : times) {
    while (t < target) {
      const Rates rates = evaluate(g, st, u, n, slope_bc, neumann, speed);
      max_slope = std::max(max_slope, rates.max_slope);
      if (!(rates.max_slope <= params.slope_cap))
        throw Error(ErrorKind::slope_cap_exceeded,
                    "max |u'| = " + std::to_string(rates.max_slope) + " at t = " + std::to_string(t));
      min_speed = std::min(min_speed, speed.head(g.size() - 1).minCoeff());
      dt = params.cfl * rates.dt_limit;
      if (t + dt >= target) dt = target - t;
      if (dt < params.dt_min && t + dt < target)
        throw Error(ErrorKind::cfl_underflow, "time step " + std::to_string(dt) + " below minimum");
      u += dt * speed;
      t = t + dt >= target ? target : t + dt;
      ratio = dt / rates.dt_limit;
      dt_min_seen = std::min(dt_min_seen, dt);
      ++steps;
    }
    FlowState s = snapshot(u0, u, target);
    s.dt_last = dt;
    s.cfl = ratio;
    s.dt_min_seen = dt_min_seen;
    s.steps = steps;
    s.max_slope = max_slope;
    s.min_speed = min_speed;
    out.push_back(std::move(s));
  }
  return out;
}

FlowState evolve_radial_mcf(const Profile& u0, int n, double t_end, const FlowParams& params) {
  const std::array<double, 1> times{t_end};
  return evolve_radial_mcf(u0, n, times, params).front();
}

double self_similarity_defect(const FlowState& s1, const FlowState& s2) {
  require(s1.t > 0.0 && s2.t > s1.t, ErrorKind::invalid_parameter, "need 0 < t1 < t2");
  const auto& p1 = s1.profile;
  const auto& p2 = s2.profile;
  require(p1.grid() == p2.grid(), ErrorKind::invalid_parameter, "states must share a grid");
  const RadialGrid& g = p1.grid();
  const double lam = std::sqrt(s2.t / s1.t);
  double defect = 0.0;
  for (Eigen::Index i = 0; i < g.size() && g[i] <= 0.5 * g.r_max(); ++i) {
    const double rr = g[i] / lam;
    const Eigen::Index j = g.locate(rr);
    const double w = (rr - g[j]) / (g[j + 1] - g[j]);
    const double u1 = (1.0 - w) * p1.u()[j] + w * p1.u()[j + 1];
    defect = std::max(defect, std::abs(p2.u()[i] - lam * u1));
  }
  return defect;
}

double link_extinction_time(int n, double theta0) {
  require(n >= 2, ErrorKind::invalid_parameter, "n must be >= 2");
  require(theta0 > 0.0 && theta0 < M_PI, ErrorKind::invalid_parameter, "theta0 must lie in (0, pi)");
  const double c = std::abs(std::cos(theta0));
  if (c < 1e-15) return std::numeric_limits<double>::infinity();
  return -std::log(c) / (n - 1);
}

LinkState link_sphere_flow(int n, double theta0, double t) {
  const double T = link_extinction_time(n, theta0);
  require(t >= 0.0, ErrorKind::invalid_parameter, "t must be >= 0");
  require(t < T, ErrorKind::past_extinction,
          "t = " + std::to_string(t) + " is past extinction T = " + std::to_string(T));
  if (std::isinf(T)) return {n, M_PI / 2, t};
  return {n, std::acos(std::cos(theta0) * std::exp((n - 1) * t)), t};
}

LinkState link_sphere_flow_integrated(int n, double theta0, double t, double tol) {
  const double T = link_extinction_time(n, theta0);
  require(t >= 0.0, ErrorKind::invalid_parameter, "t must be >= 0");
  require(t < T, ErrorKind::past_extinction,
          "t = " + std::to_string(t) + " is past extinction T = " + std::to_string(T));
  if (std::isinf(T) || t == 0.0) return {n, std::isinf(T) ? M_PI / 2 : theta0, t};
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 1>;
  State s{theta0};
  auto rhs = [n](const State& x, State& dx, double) { dx[0] = -(n - 1) / std::tan(x[0]); };
  odeint::integrate_adaptive(
      odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>()), rhs, s, 0.0, t,
      std::min(1e-3, t / 16));
  return {n, s[0], t};
}

PinchingResult pinching_check(const LinkState& link) {
  require(link.theta > 0.0 && link.theta < M_PI, ErrorKind::invalid_parameter,
          "theta must lie in (0, pi)");
  const int n = link.n;
  if (n == 2) return {true, std::numeric_limits<double>::infinity()};
  const double cot = std::cos(link.theta) / std::sin(link.theta);
  const double a2 = (n - 1) * cot * cot;
  const double h2 = (n - 1.0) * (n - 1.0) * cot * cot;
  const double rhs = n == 3 ? 0.75 * h2 + 4.0 / 3.0 : h2 / (n - 2) + 2.0;
  return {a2 < rhs, rhs - a2};
}

}  // namespace expanderlab
