#include "expanderlab/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "expanderlab/parallel.hpp"

namespace expanderlab::cli {

namespace {

const std::map<std::string, Command, std::less<>> kCommands{
    {"solve", Command::solve},       {"evolve", Command::evolve}, {"entropy", Command::entropy},
    {"verify", Command::verify},     {"sweep", Command::sweep},   {"pipeline", Command::pipeline},
    {"plot", Command::plot}};

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [k, v] : kCommands)
    if (v == c) return k;
  return "solve";
}

Command command_from_string(std::string_view name) {
  const auto it = kCommands.find(name);
  if (it == kCommands.end()) throw Error(ErrorKind::usage, "unknown command '" + std::string(name) + "'");
  return it->second;
}

void RunConfig::validate() const {
  auto usage = [](bool ok, const std::string& msg) { require(ok, ErrorKind::usage, msg); };
  usage(n >= 2, "--n must be >= 2 (e.g. --n 2)");
  usage(std::isfinite(tau) && tau >= 0.0, "--tau must be >= 0 (e.g. --tau 1.0)");
  usage(eps > 0.0, "--eps must be > 0 (e.g. --eps 1e-4)");
  usage(theta0 > 0.0 && theta0 < M_PI, "--theta0 must lie in (0, pi) (e.g. --theta0 0.785)");
  usage(tcut >= 0.0 && tcut < 1.0, "--tcut is a fraction of the extinction time in [0, 1) (e.g. --tcut 0.5)");
  usage(tend > 0.0, "--tend must be > 0");
  usage(rmax >= 10.0, "--rmax must be >= 10 so the slope at infinity can be read (e.g. --rmax 40)");
  usage(nodes >= 16, "--nodes must be >= 16 (e.g. --nodes 2048)");
  usage(stretch >= 1.0, "--stretch must be >= 1 (e.g. --stretch 1)");
  usage(tol > 0.0, "--tol must be > 0 (e.g. --tol 1e-10)");
  usage(jobs >= 1, "--jobs must be >= 1");
  usage(boundary == "dirichlet" || boundary == "neumann", "--boundary must be dirichlet or neumann");
  usage(experiment == "compactness" || experiment == "properness" || experiment == "mcf" ||
            experiment == "continuity",
        "--experiment must be one of compactness, properness, mcf, continuity");
  usage(!out.empty(), "--out must name a directory");
  usage((command != Command::verify && command != Command::plot) || !input.empty(),
        "this command needs --input <file>");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"command", "n",     "tau",    "eps",     "theta0", "tcut",
                                             "tend",    "rmax",  "nodes",  "stretch", "tol",    "jobs",
                                             "seed",    "boundary", "out", "input",   "kind",   "experiment"};
  return keys;
}

RunConfig apply_config(const json& j, RunConfig c) {
  require(j.is_object(), ErrorKind::usage, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw Error(ErrorKind::usage, "unknown config key '" + key + "'; remove it or use one of the --flag names");
    try {
      if (key == "command") c.command = command_from_string(value.get<std::string>());
      else if (key == "n") c.n = value.get<int>();
      else if (key == "tau") c.tau = value.get<double>();
      else if (key == "eps") c.eps = value.get<double>();
      else if (key == "theta0") c.theta0 = value.get<double>();
      else if (key == "tcut") c.tcut = value.get<double>();
      else if (key == "tend") c.tend = value.get<double>();
      else if (key == "rmax") c.rmax = value.get<double>();
      else if (key == "nodes") c.nodes = value.get<int>();
      else if (key == "stretch") c.stretch = value.get<double>();
      else if (key == "tol") c.tol = value.get<double>();
      else if (key == "jobs") c.jobs = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "boundary") c.boundary = value.get<std::string>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "input") c.input = value.get<std::string>();
      else if (key == "kind") c.kind = value.get<std::string>();
      else if (key == "experiment") c.experiment = value.get<std::string>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::usage, "config key '" + key + "' has the wrong type; fix its value");
    }
  }
  return c;
}

namespace {

ShootOptions shoot_options(const RunConfig& c) {
  ShootOptions o;
  o.nodes = c.nodes;
  o.r_max = c.rmax;
  o.stretch = c.stretch;
  o.tol = c.tol;
  return o;
}

EntropySearch search_options(const RunConfig& c) {
  EntropySearch s;
  s.seed = c.seed;
  s.jobs = c.jobs;
  return s;
}

fs::path out_dir(const RunConfig& c) { return fs::path(c.out); }

void print_checks(const std::vector<CheckReport>& checks, std::ostream& log) {
  for (const auto& r : checks)
    log << (r.pass ? "PASS " : "FAIL ") << r.name << "  sup=" << r.sup_residual << "  tol=" << r.tolerance
        << (r.note.empty() ? "" : "  (" + r.note + ")") << '\n';
}

int run_solve(const RunConfig& c, std::ostream& log) {
  const auto sol = shoot(c.n, c.tau, shoot_options(c));
  double decay = kNaN;
  if (c.tau > 0.0) decay = decay_constant(sol.profile, ConeSpec{c.n, c.tau});
  write_profile_csv(sol.profile, out_dir(c) / "profile.csv");
  write_json(to_json(sol, c.n, c.tau, decay), out_dir(c) / "solve.json");
  log << "a = " << sol.a << "  residual = " << sol.residual_sup << "  slope error = " << sol.slope_error
      << "  M = " << decay << '\n';
  return 0;
}

int run_evolve(const RunConfig& c, std::ostream& log) {
  require(c.tau > 0.0, ErrorKind::usage, "evolve needs --tau > 0");
  const RadialGrid grid = make_radial_grid(c.nodes, c.rmax, c.stretch);
  FlowParams fp;
  fp.boundary = boundary_from_string(c.boundary);
  std::vector<double> times;
  for (int k = 1; k <= 10; ++k) times.push_back(c.tend * k / 10);
  const auto states = evolve_radial_mcf(mollified_cone(c.tau, c.eps, grid), c.n, times, fp);
  const double defect = self_similarity_defect(states[4], states[9]);
  write_flow_csv(states, out_dir(c) / "flow.csv");
  write_profile_csv(states.back().profile, out_dir(c) / "profile.csv");
  write_json({{"t_end", c.tend},
              {"defect", defect},
              {"cfl_min", states.back().dt_min_seen},
              {"cfl", states.back().cfl},
              {"steps", states.back().steps},
              {"boundary_mode", c.boundary}},
             out_dir(c) / "evolve.json");
  log << "t_end = " << c.tend << "  steps = " << states.back().steps << "  defect = " << defect << '\n';
  return 0;
}

int run_entropy(const RunConfig& c, std::ostream& log) {
  json j;
  const auto cone = cone_entropy(ConeSpec{c.n, c.tau}, search_options(c));
  j["cone"] = to_json(cone);
  log << "lambda[cone] = " << cone.lambda << '\n';
  if (!c.input.empty()) {
    const auto rep = entropy_of_profile(read_profile_csv(c.input), c.n, search_options(c));
    j["profile"] = to_json(rep);
    log << "lambda[profile] = " << rep.lambda << (rep.boundary_hit ? "  (scale boundary reached)" : "") << '\n';
  }
  write_json(j, out_dir(c) / "entropy.json");
  return 0;
}

int run_verify(const RunConfig& c, std::ostream& log) {
  const Profile p = read_profile_csv(c.input);
  std::vector<CheckReport> checks;
  json skipped = json::array();
  auto attempt = [&](const std::string& name, auto&& fn) {
    try {
      checks.push_back(fn());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::hypothesis_violation) throw;
      skipped.push_back({{"name", name}, {"reason", e.what()}});
      log << "SKIP " << name << "  " << e.what() << '\n';
    }
  };
  const double tau = p.meta().cone ? p.meta().cone->tau
                     : p.grid().r_max() >= 10.0 ? std::max(0.0, trace_at_infinity(p).tau)
                                                : 0.0;
  const ConeSpec cone{c.n, tau};
  attempt("mean_convexity", [&] { return mean_convexity_check(p, c.n); });
  attempt("h_identity", [&] { return h_identity_check(p, c.n); });
  attempt("curvature_ratio_bound", [&] { return curvature_ratio_bound(p, cone, c.n); });
  attempt("drift_H_residual", [&] { return drift_H_residual(p, c.n); });
  attempt("ratio_subsolution", [&] { return ratio_subsolution_check(p, c.n); });
  attempt("area_ratio", [&] {
    const double lambda = cone.flat() ? 1.0 : cone_entropy(cone, search_options(c)).lambda;
    const double top = 0.9 * std::hypot(p.grid().r_max(), p.u()[p.size() - 1]);
    std::vector<double> radii;
    for (int i = 0; i < 20; ++i) radii.push_back(0.25 * std::pow(top / 0.25, i / 19.0));
    return area_ratio_check(p, c.n, lambda, radii);
  });
  print_checks(checks, log);
  json arr = json::array();
  for (const auto& r : checks) arr.push_back(to_json(r));
  write_json({{"checks", arr}, {"skipped", skipped}}, out_dir(c) / "verify.json");
  write_curvature_csv(curvatures(p, c.n), out_dir(c) / "curvature.csv");
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const auto& r) { return r.pass; });
  return ok ? 0 : 1;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return !v.empty();
}

int run_sweep(const RunConfig& c, std::ostream& log) {
  ExperimentOptions eo;
  eo.shoot = shoot_options(c);
  eo.jobs = c.jobs;
  eo.seed = c.seed;
  SweepTable table;
  bool ok = true;
  if (c.experiment == "compactness") {
    std::vector<double> seq;
    for (int i = 1; i <= 18; ++i) seq.push_back(c.tau * (1.0 + std::exp2(-i)));
    table = compactness_sweep(c.n, seq, c.tau, 10.0, eo);
    std::vector<double> d;
    for (const auto& r : table.rows) d.push_back(r.distance_c1);
    ok = strictly_decreasing(d) && d.back() < 1e-4;
  } else if (c.experiment == "properness") {
    table = properness_probe(c.n, {0.25, 4.0}, 9, eo);
    ok = table.get("bounded") == 1.0 && table.get("ratio_min") >= 0.3 && table.get("ratio_max") <= 0.7;
  } else if (c.experiment == "mcf") {
    MCFOptions mo;
    mo.nodes = c.nodes;
    mo.r_max = c.rmax;
    mo.flow.boundary = boundary_from_string(c.boundary);
    mo.jobs = c.jobs;
    table = mcf_vs_shooting(c.n, c.tau, {1e-1, 1e-2, 1e-3, 1e-4}, mo);
    std::vector<double> d;
    for (const auto& r : table.rows) d.push_back(r.distance);
    ok = strictly_decreasing(d) && table.get("extrapolated") < 5e-3 && table.rows.back().extra < 5e-3;
  } else {
    std::vector<double> seq;
    for (int i = 1; i <= 8; ++i) seq.push_back(c.tau * (1.0 + std::exp2(-i)));
    EntropySearch s = search_options(c);
    const auto rows = entropy_continuity_experiment(c.n, seq, c.tau, s);
    table.name = "continuity";
    std::vector<double> d;
    for (const auto& r : rows) {
      SweepRow row;
      row.parameter = r.tau;
      row.lambda = r.lambda;
      row.distance = r.difference;
      row.extra = r.quad_error;
      table.rows.push_back(row);
      d.push_back(r.difference);
    }
    ok = strictly_decreasing(d) && d.back() < 1e-3;
  }
  write_sweep_csv(table, out_dir(c) / "sweep.csv");
  write_json(to_json(table), out_dir(c) / "sweep.json");
  for (const auto& r : table.rows)
    log << r.parameter << "  d=" << r.distance << "  d1=" << r.distance_c1 << "  a=" << r.a << "  lambda=" << r.lambda
        << "  " << r.status << '\n';
  for (const auto& [k, v] : table.summary) log << k << " = " << v << '\n';
  log << (ok ? "contract holds" : "contract FAILED") << '\n';
  return ok ? 0 : 1;
}

int run_pipeline(const RunConfig& c, std::ostream& log) {
  const double T = link_extinction_time(c.n, c.theta0);
  const double t_cut = std::isinf(T) ? 0.0 : c.tcut * T;
  PipelineOptions po;
  po.shoot = shoot_options(c);
  po.search = search_options(c);
  const Dossier d = existence_pipeline(c.n, c.theta0, t_cut, po);
  write_json(to_json(d), out_dir(c) / "dossier.json");
  log << "tau = " << d.tau << "  a = " << d.a << "  lambda = " << d.lambda_expander << " vs " << d.lambda_cone
      << (d.flat ? "  (flat)" : "") << '\n';
  print_checks(d.checks, log);
  if (!d.failed_stage.empty()) log << "failed stage: " << d.failed_stage << '\n';
  log << (d.pass ? "dossier PASS" : "dossier FAIL") << '\n';
  return d.pass ? 0 : 1;
}

int run_plot(const RunConfig& c, std::ostream& log) {
  const fs::path target = out_dir(c) / (fs::path(c.input).stem().string() + ".dat");
  emit_plot_data(c.input, c.kind, target);
  log << "wrote " << target.string() << '\n';
  return 0;
}

}  // namespace

int run(const RunConfig& c, std::ostream& log) {
  c.validate();
  switch (c.command) {
    case Command::solve: return run_solve(c, log);
    case Command::evolve: return run_evolve(c, log);
    case Command::entropy: return run_entropy(c, log);
    case Command::verify: return run_verify(c, log);
    case Command::sweep: return run_sweep(c, log);
    case Command::pipeline: return run_pipeline(c, log);
    case Command::plot: return run_plot(c, log);
  }
  return 2;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  if (const char* env = std::getenv("EXPANDERLAB_OUT"); env && *env) c.out = env;
  c.jobs = default_jobs();

  CLI::App app{"expanderlab: rotationally symmetric self-expanders of mean curvature flow"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<CLI::Option*> opts;
  auto add = [&](const std::string& name, auto& ref, const std::string& help) {
    auto* o = app.add_option(name, ref, help)->capture_default_str();
    opts.push_back(o);
    return o;
  };
  add("--n", c.n, "base dimension of the hypersurface");
  add("--tau", c.tau, "cone slope");
  add("--eps", c.eps, "mollification of the initial cone (evolve)");
  add("--theta0", c.theta0, "initial polar radius of the link sphere (pipeline)");
  add("--tcut", c.tcut, "link flow cut time as a fraction of extinction (pipeline)");
  add("--tend", c.tend, "final time (evolve)");
  add("--rmax", c.rmax, "outer radius of the grid");
  add("--nodes", c.nodes, "number of grid intervals");
  add("--stretch", c.stretch, "geometric growth of grid spacings");
  add("--tol", c.tol, "tolerance on the asymptotic slope");
  add("--jobs", c.jobs, "worker threads");
  add("--seed", c.seed, "seed for optimizer restarts");
  add("--boundary", c.boundary, "far-field boundary: dirichlet or neumann");
  add("--out", c.out, "output directory (default from EXPANDERLAB_OUT)");
  add("--input", c.input, "input artifact (verify, entropy, plot)");
  add("--kind", c.kind, "artifact kind for plot: profile, sweep, flow, curvature");
  add("--experiment", c.experiment, "sweep: compactness, properness, mcf, continuity");
  app.add_option("--config", config_path, "JSON config with the same keys as the flags");

  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, cmd] : kCommands) {
    auto* sc = app.add_subcommand(name, "run " + name);
    sc->fallthrough();
    subs[name] = sc;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run with --help to list flags\n";
    return 2;
  }
  for (const auto& [name, sc] : subs)
    if (sc->parsed()) c.command = kCommands.at(name);

  try {
    if (!config_path.empty()) {
      RunConfig from_file = apply_config(read_json(config_path), c);
      // flags given on the command line win over the file
      RunConfig merged = from_file;
      auto keep = [&](const char* flag, auto RunConfig::*field) {
        if (app.get_option(flag)->count() > 0) merged.*field = c.*field;
      };
      keep("--n", &RunConfig::n);
      keep("--tau", &RunConfig::tau);
      keep("--eps", &RunConfig::eps);
      keep("--theta0", &RunConfig::theta0);
      keep("--tcut", &RunConfig::tcut);
      keep("--tend", &RunConfig::tend);
      keep("--rmax", &RunConfig::rmax);
      keep("--nodes", &RunConfig::nodes);
      keep("--stretch", &RunConfig::stretch);
      keep("--tol", &RunConfig::tol);
      keep("--jobs", &RunConfig::jobs);
      keep("--seed", &RunConfig::seed);
      keep("--boundary", &RunConfig::boundary);
      keep("--out", &RunConfig::out);
      keep("--input", &RunConfig::input);
      keep("--kind", &RunConfig::kind);
      keep("--experiment", &RunConfig::experiment);
      merged.command = c.command;
      c = merged;
    }
    return run(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const auto k = e.kind();
    return k == ErrorKind::usage || k == ErrorKind::unknown_kind || k == ErrorKind::io ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace expanderlab::cli
