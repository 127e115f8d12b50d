#include "expanderlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "expanderlab/nelder_mead.hpp"
#include "expanderlab/parallel.hpp"
#include "expanderlab/quadrature.hpp"

namespace expanderlab {

namespace {

// exp(-x) below this is invisible next to O(1) values
constexpr double kWindow = 13.6;  // sqrt(4 * 46)

// Orbit factor: mean over the (n-1)-sphere of exp(-|s r w + y_off e1|^2 / 4).
double orbit_factor(int n, double sr, double yo) {
  const double d = sr - std::abs(yo);
  const double g = std::exp(-0.25 * d * d);
  if (yo == 0.0 || g == 0.0) return g;
  return g * angular_average(n, 0.5 * sr * std::abs(yo));
}

double axial_factor(double sz, double ya) {
  const double d = sz + ya;
  return std::exp(-0.25 * d * d);
}

struct Hermite {
  double r0, h, u0, u1, d0, d1;

  std::pair<double, double> at(double r) const {
    const double t = (r - r0) / h, t2 = t * t, t3 = t2 * t;
    const double u = (2 * t3 - 3 * t2 + 1) * u0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * u1 +
                     (t3 - t2) * h * d1;
    const double du = ((6 * t2 - 6 * t) * u0 + (-6 * t2 + 6 * t) * u1) / h +
                      (3 * t2 - 4 * t + 1) * d0 + (3 * t2 - 2 * t) * d1;
    return {u, du};
  }
};

Hermite hermite(const Vector& r, const Vector& u, const Vector& du, Eigen::Index i) {
  return {r[i], r[i + 1] - r[i], u[i], u[i + 1], du[i], du[i + 1]};
}

// On a singular axis du[0] is a convention; the first segment uses the secant.
Hermite segment(const Profile& p, Eigen::Index i) {
  Hermite h = hermite(p.r(), p.u(), p.du(), i);
  if (i == 0 && p.meta().singular_axis) h.d0 = (h.u1 - h.u0) / h.h;
  return h;
}

// Far-field model u = tau r + c0/r + d/r^3 matching (u, u') at r_N, with a
// band 2|d|/r^3 + dtau r on u and 6|d|/r^4 + dtau on u'.
struct TailModel {
  double tau = 0.0, c0 = 0.0, d = 0.0, dtau = 0.0;

  double u(double r) const { return tau * r + c0 / r + d / (r * r * r); }
  double du(double r) const { return tau - c0 / (r * r) - 3.0 * d / (r * r * r * r); }
  double band_u(double r) const { return 2.0 * std::abs(d) / (r * r * r) + dtau * r; }
  double band_du(double r) const { return 6.0 * std::abs(d) / (r * r * r * r) + dtau; }
};

TailModel fit_tail(const Profile& p) {
  const double rN = p.grid().r_max();
  require(rN >= 10.0, ErrorKind::quadrature_tolerance,
          "Gaussian window leaves a grid too short (r_max < 10) for a far-field model");
  const auto tr = trace_at_infinity(p);
  TailModel m;
  m.tau = p.meta().cone ? p.meta().cone->tau : tr.tau;
  m.dtau = std::abs(tr.tau - m.tau) + tr.spread;
  const double uN = p.u()[p.size() - 1], dN = p.du()[p.size() - 1];
  const double cu = (uN - m.tau * rN) * rN;
  const double cd = (m.tau - dN) * rN * rN;
  m.d = 0.5 * (cd - cu) * rN * rN;
  m.c0 = 0.5 * (3.0 * cu - cd);
  return m;
}

double max_on(double lo, double hi, double peak, auto&& f) {
  if (peak >= lo && peak <= hi) return f(peak);
  return std::max(f(lo), f(hi));
}

}  // namespace

double gaussian_constant(int n) { return std::pow(4.0 * M_PI, -0.5 * n) * sphere_area(n - 1); }

GaussianArea gaussian_area_report(const Profile& p, int n, Center c, double s, bool estimate_error) {
  require(n >= 2, ErrorKind::invalid_parameter, "n must be >= 2");
  require(s > 0.0 && std::isfinite(s), ErrorKind::invalid_parameter, "scale must be > 0");
  const double cn = gaussian_constant(n);
  const double yo = std::abs(c.off), ya = c.axial;
  const double r_lo = std::max(0.0, (yo - kWindow) / s);
  const double r_hi = (yo + kWindow) / s;
  const Vector& r = p.r();
  const double rN = p.grid().r_max();

  GaussianArea out;
  double sum = 0.0, err = 0.0;
  if (r_lo < rN) {
    const Eigen::Index first = p.grid().locate(r_lo);
    for (Eigen::Index i = first; i + 1 < p.size() && r[i] < r_hi; ++i) {
      const double a = std::max(r[i], r_lo), b = std::min(r[i + 1], r_hi);
      if (b <= a) continue;
      const Hermite hs = segment(p, i);
      auto f = [&](double x) {
        const auto [ux, dx] = hs.at(x);
        return orbit_factor(n, s * x, yo) * axial_factor(s * ux, ya) * std::sqrt(1.0 + dx * dx) *
               std::pow(x, n - 1);
      };
      // at large scales one cell can hold most of the Gaussian window
      const int pieces = std::max(1, static_cast<int>(std::ceil(2.0 * s * (b - a))));
      const double w = (b - a) / pieces;
      for (int k = 0; k < pieces; ++k) {
        const double lo = a + k * w, hi = k + 1 == pieces ? b : lo + w;
        const double g5 = boost::math::quadrature::gauss<double, 5>::integrate(f, lo, hi);
        sum += g5;
        if (estimate_error) err += std::abs(g5 - boost::math::quadrature::gauss<double, 3>::integrate(f, lo, hi));
      }
    }
  }
  const double sn = std::pow(s, n);
  out.value = cn * sn * sum;
  out.quad_error = cn * sn * err;

  if (r_hi > rN) {
    const TailModel m = fit_tail(p);
    // integrate in q = s r so huge windows at small scales stay well scaled
    const double q0 = s * rN, q1 = yo + kWindow;
    std::vector<double> cuts{q0, q1};
    if (yo > q0 && yo < q1) cuts.push_back(yo);
    if (m.tau > 0.0 && -ya / m.tau > q0 && -ya / m.tau < q1) cuts.push_back(-ya / m.tau);
    std::sort(cuts.begin(), cuts.end());
    auto piece = [&](int which) {
      auto f = [&](double q) {
        const double x = q / s;
        const double base = orbit_factor(n, q, yo) * std::pow(q, n - 1);
        const double um = m.u(x), dm = m.du(x);
        if (which == 0) return base * axial_factor(s * um, ya) * std::sqrt(1.0 + dm * dm);
        const double bu = m.band_u(x), bd = m.band_du(x);
        const double zlo = std::min(axial_factor(s * (um - bu), ya), axial_factor(s * (um + bu), ya));
        const double zhi = max_on(um - bu, um + bu, -ya / s, [&](double v) { return axial_factor(s * v, ya); });
        const double slo = std::max(0.0, std::abs(dm) - bd), shi = std::abs(dm) + bd;
        return which < 0 ? base * zlo * std::sqrt(1.0 + slo * slo) : base * zhi * std::sqrt(1.0 + shi * shi);
      };
      double total = 0.0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        total += integrate_adaptive(f, cuts[k], cuts[k + 1], 1e-12, 12, 1e-16).value;
      return cn * total;
    };
    const double mid = piece(0);
    out.tail_lo = m.d == 0.0 && m.dtau == 0.0 ? mid : piece(-1);
    out.tail_hi = m.d == 0.0 && m.dtau == 0.0 ? mid : piece(1);
    out.value += mid;
  }
  return out;
}

double gaussian_area(const Profile& p, int n, Center center, double scale) {
  return gaussian_area_report(p, n, center, scale, false).value;
}

GaussianArea cone_gaussian_area(const ConeSpec& cone, Center c) {
  cone.validate();
  const int n = cone.n;
  const double yo = std::abs(c.off), ya = c.axial, tau = cone.tau;
  const double slant = std::sqrt(1.0 + tau * tau);
  auto f = [&](double r) {
    return orbit_factor(n, r, yo) * axial_factor(tau * r, ya) * slant * std::pow(r, n - 1);
  };
  // both factors must sit inside the window
  double lo = std::max(0.0, yo - kWindow), hi = yo + kWindow;
  if (tau > 0.0) {
    lo = std::max(lo, (-ya - kWindow) / tau);
    hi = std::min(hi, (-ya + kWindow) / tau);
  } else if (std::abs(ya) > kWindow) {
    hi = lo;
  }
  GaussianArea out;
  if (hi <= lo) return out;
  std::vector<double> cuts{lo, hi};
  for (double c : {yo, tau > 0.0 ? -ya / tau : lo})
    if (c > lo && c < hi) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  // near-coincident cuts leave slivers the adaptive rule never settles
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return b - a <= 1e-9 * (1.0 + std::abs(b)); }),
             cuts.end());
  cuts.back() = hi;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const auto q = integrate_adaptive(f, cuts[k], cuts[k + 1], 1e-12, 12, 1e-16);
    out.value += q.value;
    out.quad_error += q.error;
  }
  const double cn = gaussian_constant(n);
  out.value *= cn;
  out.quad_error *= cn;
  return out;
}

MeridianCurve sphere_meridian(double R, int N) {
  require(R > 0.0 && N >= 16, ErrorKind::invalid_parameter, "sphere needs R > 0 and N >= 16");
  MeridianCurve m;
  m.t = Vector::LinSpaced(N + 1, 0.0, M_PI);
  m.r = R * m.t.array().sin();
  m.z = R * m.t.array().cos();
  m.dr = R * m.t.array().cos();
  m.dz = -R * m.t.array().sin();
  m.r[N] = 0.0;
  return m;
}

double gaussian_area(const MeridianCurve& m, int n, Center c, double s) {
  require(n >= 2 && s > 0.0, ErrorKind::invalid_parameter, "need n >= 2 and scale > 0");
  const double yo = std::abs(c.off), ya = c.axial;
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < m.t.size(); ++i) {
    const Hermite hr = hermite(m.t, m.r, m.dr, i);
    const Hermite hz = hermite(m.t, m.z, m.dz, i);
    auto f = [&](double t) {
      const auto [r, dr] = hr.at(t);
      const auto [z, dz] = hz.at(t);
      return orbit_factor(n, s * r, yo) * axial_factor(s * z, ya) * std::pow(std::max(r, 0.0), n - 1) *
             std::hypot(dr, dz);
    };
    sum += boost::math::quadrature::gauss<double, 5>::integrate(f, m.t[i], m.t[i + 1]);
  }
  return gaussian_constant(n) * std::pow(s, n) * sum;
}

namespace {

struct Candidate {
  Vector x;
  double f;
};

std::vector<Candidate> best_of(std::vector<Candidate> all, std::size_t k) {
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.f > b.f; });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace

EntropyReport entropy_of_profile(const Profile& p, int n, const EntropySearch& search) {
  require(search.rho_min > 0.0 && search.rho_max > search.rho_min && search.y_box > 0.0,
          ErrorKind::invalid_parameter, "bad entropy search box");
  const double L0 = std::log(search.rho_min), L1 = std::log(search.rho_max), Y = search.y_box;
  Vector lo(3), hi(3);
  lo << L0, -Y, -Y;
  hi << L1, Y, Y;
  auto F = [&](const Vector& x) { return gaussian_area(p, n, {x[1], x[2]}, std::exp(x[0])); };

  std::vector<Vector> grid;
  constexpr int kScale = 13, kAxial = 25;
  const std::array<double, 3> offs{0.0, 1.5, 4.0};
  for (int i = 0; i < kScale; ++i)
    for (int j = 0; j < kAxial; ++j)
      for (double yo : offs) {
        Vector x(3);
        x << L0 + (L1 - L0) * i / (kScale - 1), -Y + 2 * Y * j / (kAxial - 1), std::min(yo, Y);
        grid.push_back(x);
      }
  const auto values = parallel_map(grid.size(), search.jobs, [&](std::size_t i) { return F(grid[i]); });
  std::vector<Candidate> scan;
  for (std::size_t i = 0; i < grid.size(); ++i) scan.push_back({grid[i], values[i]});
  const auto seeds = best_of(scan, 3);

  auto objective = [&](const Vector& x) {
    const Vector xc = x.cwiseMax(lo).cwiseMin(hi);
    return -F(xc) + 1e-3 * (x - xc).squaredNorm();
  };
  Vector step(3);
  step << 1.0, 0.5, 0.5;
  auto runs = parallel_map(seeds.size(), search.jobs, [&](std::size_t i) {
    NelderMeadOptions o;
    o.seed = search.seed + i;
    return nelder_mead(objective, seeds[i].x, step, o);
  });
  int evals = static_cast<int>(grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    evals += runs[i].evals;
    if (runs[i].fx < runs[best].fx) best = i;
  }
  const Vector x = runs[best].x.cwiseMax(lo).cwiseMin(hi);

  EntropyReport rep;
  const auto at = gaussian_area_report(p, n, {x[1], std::abs(x[2])}, std::exp(x[0]), true);
  // a blow-up at any regular point has F -> 1, so lambda >= 1 regardless of the box
  rep.lambda = std::max(at.value, 1.0);
  rep.lambda_upper = rep.lambda + at.bracket() + at.quad_error;
  rep.f_identity = gaussian_area(p, n, {}, 1.0);
  rep.argmax_scale = std::exp(x[0]);
  rep.argmax_center = {x[1], std::abs(x[2])};
  rep.quad_error = at.quad_error + at.bracket();
  rep.tail_bracket = at.bracket();
  rep.search_radius = Y;
  const double tol = 1e-6;
  rep.boundary_hit = x[0] <= L0 + tol || x[0] >= L1 - tol || std::abs(x[1]) >= Y - tol ||
                     std::abs(x[2]) >= Y - tol;
  rep.evaluations = evals;
  return rep;
}

EntropyReport cone_entropy(const ConeSpec& cone, const EntropySearch& search) {
  cone.validate();
  EntropyReport rep;
  if (cone.flat()) {
    // F[plane + y] = exp(-y_a^2 / 4)
    rep.lambda = rep.lambda_upper = rep.f_identity = 1.0;
    return rep;
  }
  int evals = 0;
  auto G = [&](double ya, double yo) {
    ++evals;
    return cone_gaussian_area(cone, {ya, yo}).value;
  };

  // Grow the ball until the shell sits below 1 + eps_bd.
  double R = search.radius_start;
  const int dirs = search.shell_directions;
  for (;;) {
    std::vector<double> angles;
    for (int k = 0; k < dirs; ++k) angles.push_back(2.0 * M_PI * k / dirs);
    angles.push_back(std::atan2(1.0, -cone.tau));
    std::vector<double> vals(angles.size());
    for (std::size_t k = 0; k < angles.size(); ++k) vals[k] = G(R * std::cos(angles[k]), R * std::sin(angles[k]));
    const auto kmax = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    double shell = vals[kmax];
    // golden-section polish of the best direction
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = angles[kmax] - 2.0 * M_PI / dirs, b = angles[kmax] + 2.0 * M_PI / dirs;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = G(R * std::cos(c1), R * std::sin(c1)), f2 = G(R * std::cos(c2), R * std::sin(c2));
    for (int it = 0; it < 40; ++it) {
      if (f1 > f2) {
        b = c2, c2 = c1, f2 = f1;
        c1 = b - gr * (b - a);
        f1 = G(R * std::cos(c1), R * std::sin(c1));
      } else {
        a = c1, c1 = c2, f1 = f2;
        c2 = a + gr * (b - a);
        f2 = G(R * std::cos(c2), R * std::sin(c2));
      }
    }
    shell = std::max({shell, f1, f2});
    if (shell < 1.0 + search.eps_bd) break;
    R *= 2.0;
    if (R > search.radius_max)
      throw Error(ErrorKind::search_radius_overflow,
                  "boundary shell still above 1 + eps_bd at radius " + std::to_string(R / 2));
  }

  // Interior: rings at dyadic radii, then simplex polish from the best few.
  std::vector<Vector> pts;
  pts.push_back(Vector::Zero(2));
  for (double rho = R; rho >= 0.125; rho *= 0.5)
    for (double f : {1.0, 0.75})
      for (int k = 0; k < 32; ++k) {
        const double th = 2.0 * M_PI * (k + 0.5 * (f < 1.0)) / 32;
        Vector x(2);
        x << f * rho * std::cos(th), f * rho * std::sin(th);
        pts.push_back(x);
      }
  const auto vals = parallel_map(pts.size(), search.jobs, [&](std::size_t i) {
    return cone_gaussian_area(cone, {pts[i][0], pts[i][1]}).value;
  });
  evals += static_cast<int>(pts.size());
  std::vector<Candidate> scan;
  for (std::size_t i = 0; i < pts.size(); ++i) scan.push_back({pts[i], vals[i]});
  const auto seeds = best_of(scan, 3);

  auto objective = [&](const Vector& x) {
    const double norm = x.norm();
    const Vector xc = norm > R ? Vector(x * (R / norm)) : x;
    return -cone_gaussian_area(cone, {xc[0], xc[1]}).value + 1e-3 * (x - xc).squaredNorm();
  };
  Vector step(2);
  step << 0.5, 0.5;
  auto runs = parallel_map(seeds.size(), search.jobs, [&](std::size_t i) {
    NelderMeadOptions o;
    o.seed = search.seed + i;
    o.x_tol = 1e-8;
    return nelder_mead(objective, seeds[i].x, step, o);
  });
  std::size_t best = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    evals += runs[i].evals;
    if (runs[i].fx < runs[best].fx) best = i;
  }
  Vector x = runs[best].x;
  if (x.norm() > R) x *= R / x.norm();
  const auto at = cone_gaussian_area(cone, {x[0], x[1]});

  rep.lambda = std::max(at.value, 1.0);
  rep.lambda_upper = std::max(at.value, 1.0 + search.eps_bd);
  rep.f_identity = cone_gaussian_area(cone, {}).value;
  rep.argmax_scale = 1.0;
  rep.argmax_center = {x[0], std::abs(x[1])};
  rep.quad_error = at.quad_error;
  rep.search_radius = R;
  rep.boundary_hit = x.norm() >= R * (1.0 - 1e-9);
  rep.evaluations = evals;
  return rep;
}

double area_ratio_constant(int n) { return std::pow(4.0 * M_PI, 0.5 * n) * std::exp(0.25); }

double area_in_ball(const Profile& p, int n, double R) {
  require(R > 0.0, ErrorKind::invalid_parameter, "ball radius must be > 0");
  const Vector& r = p.r();
  const Vector& u = p.u();
  auto radius2 = [&](Eigen::Index i) { return r[i] * r[i] + u[i] * u[i]; };
  Eigen::Index j = 0;
  while (j < p.size() && radius2(j) < R * R) ++j;
  require(j < p.size(), ErrorKind::invalid_parameter, "ball radius reaches past the grid");
  if (j == 0) return 0.0;
  const Hermite last = segment(p, j - 1);
  auto g = [&](double x) {
    const double ux = last.at(x).first;
    return x * x + ux * ux - R * R;
  };
  std::uintmax_t iters = 100;
  auto [a, b] = boost::math::tools::toms748_solve(
      g, r[j - 1], r[j], [](double x0, double x1) { return std::abs(x1 - x0) <= 1e-15 * (1.0 + x0); }, iters);
  const double r_edge = 0.5 * (a + b);

  double sum = 0.0;
  for (Eigen::Index i = 0; i < j; ++i) {
    const Hermite hs = segment(p, i);
    const double hi = i == j - 1 ? r_edge : r[i + 1];
    auto f = [&](double x) {
      const double dx = hs.at(x).second;
      return std::sqrt(1.0 + dx * dx) * std::pow(x, n - 1);
    };
    sum += boost::math::quadrature::gauss<double, 5>::integrate(f, r[i], hi);
  }
  return sphere_area(n - 1) * sum;
}

std::vector<double> area_ratios(const Profile& p, int n, double lambda, const std::vector<double>& radii) {
  const double mt = area_ratio_constant(n);
  std::vector<double> out;
  for (double R : radii) out.push_back(area_in_ball(p, n, R) / (mt * lambda * std::pow(R, n)));
  return out;
}

CheckReport area_ratio_check(const Profile& p, int n, double lambda, const std::vector<double>& radii) {
  require(!radii.empty(), ErrorKind::invalid_parameter, "no radii given");
  const auto ratios = area_ratios(p, n, lambda, radii);
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  return CheckReport::make("area_ratio", worst, 1.0, "gauss-legendre on hermite interpolant",
                           std::to_string(radii.size()) + " radii");
}

std::vector<ContinuityRow> entropy_continuity_experiment(int n, const std::vector<double>& tau_seq,
                                                         double tau_limit, const EntropySearch& search) {
  EntropySearch inner = search;
  inner.jobs = 1;
  const auto limit = cone_entropy(ConeSpec{n, tau_limit}, inner);
  auto rows = parallel_map(tau_seq.size(), search.jobs, [&](std::size_t i) {
    const auto rep = cone_entropy(ConeSpec{n, tau_seq[i]}, inner);
    return ContinuityRow{tau_seq[i], rep.lambda, std::abs(rep.lambda - limit.lambda),
                         rep.quad_error + limit.quad_error};
  });
  return rows;
}

}  // namespace expanderlab
