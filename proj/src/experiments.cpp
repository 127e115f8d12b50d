#include "expanderlab/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "expanderlab/analysis.hpp"
#include "expanderlab/parallel.hpp"

namespace expanderlab {

double SweepTable::get(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  throw Error(ErrorKind::invalid_parameter, "no summary entry '" + key + "' in " + name);
}

namespace {

template <class Fn>
SweepRow guarded(double parameter, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    SweepRow row;
    row.parameter = parameter;
    row.status = std::string(to_string(e.kind()));
    return row;
  }
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i)
    out.push_back(lo * std::pow(hi / lo, count == 1 ? 0.0 : static_cast<double>(i) / (count - 1)));
  return out;
}

}  // namespace

SweepTable compactness_sweep(int n, const std::vector<double>& tau_seq, double tau_limit, double R_window,
                             const ExperimentOptions& opts) {
  require(R_window > 0.0 && R_window <= opts.shoot.r_max, ErrorKind::invalid_parameter,
          "window must lie inside the grid");
  const auto limit = shoot(n, tau_limit, opts.shoot);
  const Profile& U = limit.profile;
  SweepTable table;
  table.name = "compactness";
  table.rows = parallel_map(tau_seq.size(), opts.jobs, [&](std::size_t i) {
    return guarded(tau_seq[i], [&] {
      const auto sol = shoot(n, tau_seq[i], opts.shoot);
      SweepRow row;
      row.parameter = tau_seq[i];
      row.a = sol.a;
      double c0 = 0.0, c1 = 0.0;
      for (Eigen::Index j = 0; j < U.size() && U.r()[j] <= R_window; ++j) {
        c0 = std::max(c0, std::abs(sol.profile.u()[j] - U.u()[j]));
        c1 = std::max(c1, std::abs(sol.profile.du()[j] - U.du()[j]));
      }
      row.distance = c0;
      row.distance_c1 = c0 + c1;
      row.pass_count = sol.residual_sup < 1e-8;
      return row;
    });
  });
  // least squares d ~ C |tau_i - tau|
  double num = 0.0, den = 0.0;
  for (const auto& row : table.rows) {
    if (row.status != "ok") continue;
    const double dt = std::abs(row.parameter - tau_limit);
    num += dt * row.distance_c1;
    den += dt * dt;
  }
  table.summary.push_back({"a_limit", limit.a});
  table.summary.push_back({"fit_C", den > 0.0 ? num / den : kNaN});
  return table;
}

SweepTable properness_probe(int n, std::pair<double, double> tau_interval, int samples,
                            const ExperimentOptions& opts) {
  const auto [lo, hi] = tau_interval;
  require(lo > 0.0 && hi > lo && samples >= 2, ErrorKind::invalid_parameter, "bad properness interval");
  SweepTable table;
  table.name = "properness";
  const auto taus = log_spaced(lo, hi, samples);
  const double tau0 = std::sqrt(lo * hi);
  const double h0 = 0.25 * std::min(tau0 - lo, hi - tau0);
  constexpr int kHalvings = 6;
  std::vector<double> params = taus;
  params.push_back(tau0);
  for (int k = 0; k < kHalvings; ++k) params.push_back(tau0 + h0 * std::exp2(-k));

  const auto rows = parallel_map(params.size(), opts.jobs, [&](std::size_t i) {
    return guarded(params[i], [&] {
      const auto sol = shoot(n, params[i], opts.shoot);
      SweepRow row;
      row.parameter = params[i];
      row.a = sol.a;
      row.pass_count = sol.residual_sup < 1e-8;
      return row;
    });
  });
  double a_max = 0.0;
  bool all_ok = true;
  for (int i = 0; i < samples; ++i) {
    table.rows.push_back(rows[i]);
    all_ok = all_ok && rows[i].status == "ok" && std::isfinite(rows[i].a);
    a_max = std::max(a_max, rows[i].a);
  }
  const SweepRow& center = rows[samples];
  std::vector<double> modulus;
  for (int k = 0; k < kHalvings; ++k) {
    SweepRow m = rows[samples + 1 + k];
    m.status = m.status == "ok" ? "modulus" : m.status;
    m.parameter = h0 * std::exp2(-k);
    m.distance = std::abs(m.a - center.a);
    modulus.push_back(m.distance);
    table.rows.push_back(m);
  }
  table.summary.push_back({"tau0", tau0});
  table.summary.push_back({"a_tau0", center.a});
  table.summary.push_back({"a_max", a_max});
  table.summary.push_back({"bounded", all_ok && std::isfinite(a_max) ? 1.0 : 0.0});
  double rmin = kNaN, rmax = kNaN;
  for (int k = 1; k < kHalvings; ++k) {
    const double ratio = modulus[k] / modulus[k - 1];
    table.summary.push_back({"ratio_" + std::to_string(k), ratio});
    rmin = k == 1 ? ratio : std::min(rmin, ratio);
    rmax = k == 1 ? ratio : std::max(rmax, ratio);
  }
  table.summary.push_back({"ratio_min", rmin});
  table.summary.push_back({"ratio_max", rmax});
  return table;
}

std::pair<double, double> extrapolate_in_eps(const std::vector<double>& eps, const std::vector<double>& d) {
  const std::size_t m = eps.size();
  if (m < 3 || d.size() != m) return {kNaN, kNaN};
  const double e1 = eps[m - 3], e2 = eps[m - 2], e3 = eps[m - 1];
  const double d1 = d[m - 3], d2 = d[m - 2], d3 = d[m - 1];
  const double p = std::log(std::abs(d1 - d2) / std::abs(d2 - d3)) / std::log(e1 / e2);
  const double d0 = d3 - (d2 - d3) / (std::pow(e2 / e3, p) - 1.0);
  return {p, d0};
}

SweepTable mcf_vs_shooting(int n, double tau, const std::vector<double>& eps_list, const MCFOptions& opts) {
  require(!eps_list.empty(), ErrorKind::invalid_parameter, "empty eps list");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    require(eps_list[i] < eps_list[i - 1], ErrorKind::invalid_parameter, "eps list must decrease");
  ShootOptions so;
  so.nodes = opts.nodes;
  so.r_max = opts.r_max;
  const auto target = shoot(n, tau, so);
  const RadialGrid& grid = target.profile.grid();

  SweepTable table;
  table.name = "mcf_vs_shooting";
  table.rows = parallel_map(eps_list.size(), opts.jobs, [&](std::size_t i) {
    return guarded(eps_list[i], [&] {
      const Profile u0 = mollified_cone(tau, eps_list[i], grid);
      const std::array<double, 2> times{0.5, 1.0};
      const auto states = evolve_radial_mcf(u0, n, times, opts.flow);
      SweepRow row;
      row.parameter = eps_list[i];
      double diff = 0.0;
      for (Eigen::Index j = 0; j < grid.size() && grid[j] <= 0.5 * grid.r_max(); ++j)
        diff = std::max(diff, std::abs(states[1].profile.u()[j] - target.profile.u()[j]));
      row.distance = diff;
      row.extra = self_similarity_defect(states[0], states[1]);
      row.a = states[1].profile.u()[0];
      return row;
    });
  });
  std::vector<double> eps, d;
  for (const auto& row : table.rows)
    if (row.status == "ok") {
      eps.push_back(row.parameter);
      d.push_back(row.distance);
    }
  const auto [p, d0] = extrapolate_in_eps(eps, d);
  table.summary.push_back({"a_shoot", target.a});
  table.summary.push_back({"eps_order", p});
  table.summary.push_back({"extrapolated", std::abs(d0)});
  return table;
}

Dossier existence_pipeline(int n, double theta0, double t_cut, const PipelineOptions& opts) {
  Dossier d;
  d.n = n;
  d.theta0 = theta0;
  d.t_cut = t_cut;
  std::string stage = "link_flow";
  try {
    d.extinction = link_extinction_time(n, theta0);
    require(theta0 <= M_PI / 2, ErrorKind::invalid_parameter, "theta0 must lie in (0, pi/2]");
    require(t_cut >= 0.0 && t_cut < d.extinction, ErrorKind::past_extinction,
            "t_cut must lie before extinction");
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opts.pinch_samples; ++k) {
      const double t = t_cut * k / (opts.pinch_samples - 1);
      const auto link = link_sphere_flow(n, theta0, t);
      const auto pc = pinching_check(link);
      d.pinching.push_back({t, link.theta, pc.margin});
      worst = std::min(worst, pc.margin);
    }
    d.checks.push_back(std::isinf(worst)
                           ? CheckReport::make("pinching", 0.0, 0.0, "umbilic closed form", "vacuous for n = 2")
                           : CheckReport::make("pinching", -worst, 0.0, "umbilic closed form",
                                               "min margin " + std::to_string(worst)));
    d.theta_cut = link_sphere_flow(n, theta0, t_cut).theta;
    const ConeSpec cone = cone_from_link_angle(n, d.theta_cut);
    d.tau = cone.tau;
    if (cone.flat() || d.tau < 1e-12) {
      d.flat = true;
      d.tau = 0.0;
      d.lambda_cone = d.lambda_expander = 1.0;
      d.pass = std::all_of(d.checks.begin(), d.checks.end(), [](const auto& c) { return c.pass; });
      return d;
    }

    stage = "shoot";
    const auto sol = shoot(n, cone.tau, opts.shoot);
    d.a = sol.a;
    const Profile& p = sol.profile;
    d.checks.push_back(CheckReport::make("expander_residual", sol.residual_sup, 1e-8, "7-point derivative of du"));
    d.checks.push_back(CheckReport::make("trace", sol.slope_error, 1e-6, "richardson on u/r"));

    stage = "analysis";
    d.checks.push_back(mean_convexity_check(p, n));
    d.checks.push_back(h_identity_check(p, n));
    d.checks.push_back(curvature_ratio_bound(p, cone, n));
    d.checks.push_back(drift_H_residual(p, n));
    d.checks.push_back(ratio_subsolution_check(p, n));

    stage = "entropy";
    const auto lc = cone_entropy(cone, opts.search);
    const auto le = entropy_of_profile(p, n, opts.search);
    d.lambda_cone = lc.lambda;
    d.lambda_expander = le.lambda;
    d.checks.push_back(CheckReport::make("entropy_identity", std::abs(le.lambda - lc.lambda) / lc.lambda, 1e-3,
                                         "cone translations vs profile scale and translations",
                                         "tail bracket " + std::to_string(le.tail_bracket)));
    d.checks.push_back(CheckReport::make("entropy_tail_bracket", le.tail_bracket, 1e-4, "far-field model band"));
    const double x_end = std::hypot(p.grid().r_max(), p.u()[p.size() - 1]);
    d.checks.push_back(area_ratio_check(p, n, lc.lambda, log_spaced(0.25, 0.9 * x_end, 20)));

    stage = "decay";
    const double m1 = decay_constant(p, cone);
    IntegrateOptions io;
    io.tol = opts.shoot.ode_tol;
    const RadialGrid wide = make_radial_grid(2 * opts.shoot.nodes, 2 * opts.shoot.r_max, opts.shoot.stretch);
    const double m2 = decay_constant(integrate_profile(n, sol.a, wide, io), cone);
    d.checks.push_back(CheckReport::make("decay_stability", std::abs(m2 - m1) / m1, 0.05, "r_max doubled",
                                         "M = " + std::to_string(m1) + " -> " + std::to_string(m2)));
  } catch (const Error& e) {
    d.failed_stage = stage + ": " + e.what();
    d.pass = false;
    return d;
  }
  d.pass = std::all_of(d.checks.begin(), d.checks.end(), [](const auto& c) { return c.pass; });
  return d;
}

}  // namespace expanderlab
