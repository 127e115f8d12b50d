#include "expanderlab/expander_ode.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "expanderlab/differentiate.hpp"

namespace expanderlab {

double expander_second_derivative(int n, double r, double u, double du) {
  if (r == 0.0) return u / (2.0 * n);
  return (1.0 + du * du) * (0.5 * (u - r * du) - (n - 1) * du / r);
}

Vector expander_residual(const Profile& p, int n) {
  require(n >= 2, ErrorKind::invalid_parameter, "n must be >= 2");
  // 7-point stencil: the 5-point truncation error alone exceeds 1e-8 for steep profiles
  const Vector d2u = differentiate(p.grid(), p.du(), Parity::odd, 1, 3);
  const Vector& r = p.r();
  const Vector& u = p.u();
  const Vector& du = p.du();
  Vector out(p.size());
  out[0] = n * d2u[0] - 0.5 * u[0];
  for (Eigen::Index i = 1; i < p.size(); ++i)
    out[i] = d2u[i] / (1.0 + du[i] * du[i]) + (n - 1) * du[i] / r[i] - 0.5 * (u[i] - r[i] * du[i]);
  return out;
}

namespace {

using State = std::array<double, 2>;

// u = a + b r^2 + c r^4 from matching powers in the ODE
State series_start(int n, double a, double r) {
  const double b = a / (4.0 * n);
  const double c = (8.0 * b * b * b - 0.5 * b) / (4.0 * n + 8.0);
  return {a + b * r * r + c * r * r * r * r, 2.0 * b * r + 4.0 * c * r * r * r};
}

}  // namespace

Profile integrate_profile(int n, double a, const RadialGrid& grid, const IntegrateOptions& opts) {
  require(n >= 2, ErrorKind::invalid_parameter, "n must be >= 2");
  require(std::isfinite(a) && a > 0.0, ErrorKind::invalid_parameter, "axis height a must be > 0");
  require(opts.tol > 0.0, ErrorKind::invalid_parameter, "tolerance must be > 0");
  namespace odeint = boost::numeric::odeint;

  const double r_ser = 1e-3 * std::min(1.0, 1.0 / a);
  const Eigen::Index m = grid.size();
  Vector u(m), du(m);

  std::vector<double> times{r_ser};
  std::vector<Eigen::Index> where{-1};
  for (Eigen::Index i = 0; i < m; ++i) {
    if (grid[i] <= r_ser) {
      const State s = series_start(n, a, grid[i]);
      u[i] = s[0];
      du[i] = s[1];
    } else {
      times.push_back(grid[i]);
      where.push_back(i);
    }
  }
  du[0] = 0.0;

  auto rhs = [n](const State& s, State& ds, double r) {
    ds[0] = s[1];
    ds[1] = expander_second_derivative(n, r, s[0], s[1]);
  };
  std::size_t k = 0;
  auto observer = [&](const State& s, double r) {
    if (where[k] >= 0) {
      u[where[k]] = s[0];
      du[where[k]] = s[1];
    }
    ++k;
    if (!(std::abs(s[1]) <= opts.slope_cap))
      throw Error(ErrorKind::blow_up, "|u'| exceeded the slope cap at r = " + std::to_string(r));
  };

  if (times.size() > 1) {
    State s = series_start(n, a, r_ser);
    auto stepper = odeint::make_controlled(opts.tol, opts.tol, odeint::runge_kutta_dopri5<State>());
    const double dt0 = std::min(r_ser, grid.min_spacing()) * 0.1;
    try {
      odeint::integrate_times(stepper, rhs, s, times.begin(), times.end(), dt0, observer,
                              odeint::max_step_checker(opts.max_steps));
    } catch (const odeint::step_adjustment_error& e) {
      throw Error(ErrorKind::step_underflow, e.what());
    } catch (const odeint::no_progress_error& e) {
      throw Error(ErrorKind::step_underflow, e.what());
    } catch (const std::overflow_error& e) {
      throw Error(ErrorKind::step_underflow, e.what());
    }
  }

  ProfileMeta meta;
  meta.kind = ProfileKind::expander;
  meta.expander_dim = n;
  return Profile(grid, std::move(u), std::move(du), meta);
}

Profile integrate_profile(int n, double a, double r_max, double tol) {
  IntegrateOptions opts;
  opts.tol = tol;
  return integrate_profile(n, a, make_radial_grid(2048, r_max, 1.0), opts);
}

double shooting_slope(int n, double a, const RadialGrid& grid, double ode_tol) {
  IntegrateOptions opts;
  opts.tol = ode_tol;
  return trace_at_infinity(integrate_profile(n, a, grid, opts)).tau;
}

namespace {

std::string scan_table(const std::vector<ScanRow>& scan, double tau) {
  std::ostringstream os;
  os.precision(10);
  os << "scan (a, slope - tau):";
  for (const auto& row : scan) os << " (" << row.a << ", " << row.slope - tau << ")";
  return os.str();
}

}  // namespace

ShootingResult shoot(int n, double tau, const ShootOptions& opts) {
  ConeSpec{n, tau}.validate();
  require(opts.tol > 0.0 && opts.scan_refine >= 1 && opts.scan_lo < opts.scan_hi,
          ErrorKind::invalid_parameter, "bad shooting options");
  const RadialGrid grid = make_radial_grid(opts.nodes, opts.r_max, opts.stretch);
  ShootingResult result;

  if (tau == 0.0) {
    result.profile = Profile(grid, Vector::Zero(grid.size()), Vector::Zero(grid.size()),
                             ProfileMeta{ProfileKind::expander, false, ConeSpec{n, 0.0}, n, {}});
    return result;
  }

  const double base = tau * std::sqrt(static_cast<double>(n));
  for (int k = opts.scan_lo * opts.scan_refine; k <= opts.scan_hi * opts.scan_refine; ++k) {
    const double a = base * std::exp2(static_cast<double>(k) / opts.scan_refine);
    double slope;
    try {
      slope = shooting_slope(n, a, grid, opts.ode_tol);
    } catch (const Error& e) {
      // overshooting into blow-up counts as "slope too large"
      if (e.kind() != ErrorKind::blow_up) throw;
      slope = std::numeric_limits<double>::infinity();
    }
    result.scan.push_back({a, slope});
  }

  std::vector<std::size_t> changes;
  for (std::size_t i = 0; i + 1 < result.scan.size(); ++i)
    if ((result.scan[i].slope - tau) * (result.scan[i + 1].slope - tau) <= 0.0) changes.push_back(i);
  if (changes.empty())
    throw Error(ErrorKind::bracket_failure, "no sign change; " + scan_table(result.scan, tau));
  if (changes.size() > 1)
    throw Error(ErrorKind::bracket_failure,
                "multiple sign changes; " + scan_table(result.scan, tau));

  const std::size_t i = changes.front();
  auto g = [&](double a) { return shooting_slope(n, a, grid, opts.ode_tol) - tau; };
  double lo = result.scan[i].a, hi = result.scan[i + 1].a;
  double glo = result.scan[i].slope - tau, ghi = result.scan[i + 1].slope - tau;
  if (!std::isfinite(ghi)) {
    // pull the upper end in until the slope is finite
    while (!std::isfinite(ghi)) {
      const double mid = 0.5 * (lo + hi);
      double gm;
      try {
        gm = g(mid);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::blow_up) throw;
        gm = std::numeric_limits<double>::infinity();
      }
      if (gm <= 0.0) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
        ghi = gm;
      }
    }
  }

  double a_root;
  if (glo == 0.0) {
    a_root = lo;
  } else if (ghi == 0.0) {
    a_root = hi;
  } else {
    std::uintmax_t iters = 200;
    auto done = [](double x0, double x1) { return std::abs(x1 - x0) <= 1e-15 * std::abs(x0); };
    double best_a = lo, best_g = std::abs(glo);
    auto tracked = [&](double a) {
      const double v = g(a);
      if (std::abs(v) < best_g) {
        best_g = std::abs(v);
        best_a = a;
      }
      // stop on the slope residual, not only on the bracket width
      return std::abs(v) <= 0.01 * opts.tol ? 0.0 : v;
    };
    boost::math::tools::toms748_solve(tracked, lo, hi, glo, ghi, done, iters);
    result.iterations = static_cast<int>(iters);
    a_root = best_a;
  }

  IntegrateOptions iopts;
  iopts.tol = opts.ode_tol;
  Profile p = integrate_profile(n, a_root, grid, iopts);
  ProfileMeta meta = p.meta();
  meta.cone = ConeSpec{n, tau};
  result.profile = Profile(grid, p.u(), p.du(), meta);
  result.a = a_root;
  result.slope_error = std::abs(trace_at_infinity(result.profile).tau - tau);
  result.residual_sup = expander_residual(result.profile, n).cwiseAbs().maxCoeff();
  if (result.slope_error > opts.tol)
    throw Error(ErrorKind::tolerance_not_met,
                "slope error " + std::to_string(result.slope_error) + " above tolerance");
  return result;
}

double decay_constant(const Profile& p, const ConeSpec& cone, double trace_tol) {
  cone.validate();
  const double tr = trace_at_infinity(p).tau;
  require(std::abs(tr - cone.tau) <= trace_tol, ErrorKind::trace_mismatch,
          "profile trace " + std::to_string(tr) + " does not match cone slope " +
              std::to_string(cone.tau));
  const double s = 1.0 + cone.tau * cone.tau;
  const double half = 0.5 * p.grid().r_max();
  double m = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double r = p.r()[i];
    if (r < half) continue;
    const double u = p.u()[i];
    const double f = (u - cone.tau * r) / std::sqrt(s);
    const double df = (p.du()[i] - cone.tau) / s;
    m = std::max(m, std::hypot(r, u) * (std::abs(f) + std::abs(df)));
  }
  return m;
}

}  // namespace expanderlab
