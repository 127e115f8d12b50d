#include "expanderlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace expanderlab {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end != s.c_str() && *end == '\0', ErrorKind::io, "not a number: '" + s + "'");
  return v;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  require(out.good(), ErrorKind::io, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot read " + path.string());
  return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// "# tag key=value key=value"
std::map<std::string, std::string> parse_comment(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream is(line.substr(1));
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

}  // namespace

void write_profile_csv(const Profile& p, const fs::path& path) {
  auto out = open_out(path);
  const auto& m = p.meta();
  out << "# expanderlab profile kind=" << to_string(m.kind) << " stretch=" << fmt(p.grid().stretch())
      << " singular_axis=" << int(m.singular_axis);
  if (m.cone) out << " cone_n=" << m.cone->n << " cone_tau=" << fmt(m.cone->tau);
  if (m.expander_dim) out << " expander_dim=" << *m.expander_dim;
  if (m.time) out << " time=" << fmt(*m.time);
  out << "\nr,u,du\n";
  for (Eigen::Index i = 0; i < p.size(); ++i)
    out << fmt(p.r()[i]) << ',' << fmt(p.u()[i]) << ',' << fmt(p.du()[i]) << '\n';
  require(out.good(), ErrorKind::io, "write failed for " + path.string());
}

Profile read_profile_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::map<std::string, std::string> kv;
  bool header = false;
  std::vector<double> r, u, du;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      kv = parse_comment(line);
      continue;
    }
    if (!header) {
      require(line == "r,u,du", ErrorKind::io, "expected header 'r,u,du' in " + path.string());
      header = true;
      continue;
    }
    const auto cells = split(line, ',');
    require(cells.size() == 3, ErrorKind::io, "expected 3 columns: '" + line + "'");
    r.push_back(parse_double(cells[0]));
    u.push_back(parse_double(cells[1]));
    du.push_back(parse_double(cells[2]));
  }
  require(header, ErrorKind::io, "no profile header in " + path.string());
  ProfileMeta meta;
  double stretch = 1.0;
  if (kv.count("kind")) meta.kind = profile_kind_from_string(kv["kind"]);
  if (kv.count("stretch")) stretch = parse_double(kv["stretch"]);
  if (kv.count("singular_axis")) meta.singular_axis = kv["singular_axis"] == "1";
  if (kv.count("cone_n")) meta.cone = ConeSpec{std::stoi(kv["cone_n"]), parse_double(kv["cone_tau"])};
  if (kv.count("expander_dim")) meta.expander_dim = std::stoi(kv["expander_dim"]);
  if (kv.count("time")) meta.time = parse_double(kv["time"]);
  if (!kv.count("stretch") && r.size() > 2) {
    // plain CSV from elsewhere: take the largest spacing ratio
    for (std::size_t i = 2; i < r.size(); ++i)
      stretch = std::max(stretch, (r[i] - r[i - 1]) / (r[i - 1] - r[i - 2]));
  }
  auto vec = [](const std::vector<double>& v) { return Vector(Eigen::Map<const Vector>(v.data(), v.size())); };
  return Profile(RadialGrid(vec(r), stretch), vec(u), vec(du), meta);
}

json to_json(const ConeSpec& cone) { return {{"n", cone.n}, {"tau", cone.tau}}; }

json to_json(const Profile& p) {
  const auto& m = p.meta();
  json j;
  j["kind"] = std::string(to_string(m.kind));
  j["singular_axis"] = m.singular_axis;
  j["cone"] = m.cone ? to_json(*m.cone) : json(nullptr);
  j["expander_dim"] = m.expander_dim ? json(*m.expander_dim) : json(nullptr);
  j["time"] = m.time ? json(*m.time) : json(nullptr);
  j["grid"] = {{"N", p.grid().intervals()}, {"r_max", p.grid().r_max()}, {"stretch", p.grid().stretch()}};
  j["r"] = std::vector<double>(p.r().begin(), p.r().end());
  j["u"] = std::vector<double>(p.u().begin(), p.u().end());
  j["du"] = std::vector<double>(p.du().begin(), p.du().end());
  return j;
}

Profile profile_from_json(const json& j) {
  try {
    ProfileMeta meta;
    meta.kind = profile_kind_from_string(j.at("kind").get<std::string>());
    meta.singular_axis = j.value("singular_axis", false);
    if (j.contains("cone") && !j["cone"].is_null())
      meta.cone = ConeSpec{j["cone"].at("n").get<int>(), j["cone"].at("tau").get<double>()};
    if (j.contains("expander_dim") && !j["expander_dim"].is_null()) meta.expander_dim = j["expander_dim"].get<int>();
    if (j.contains("time") && !j["time"].is_null()) meta.time = j["time"].get<double>();
    auto vec = [](const json& a) {
      const auto v = a.get<std::vector<double>>();
      return Vector(Eigen::Map<const Vector>(v.data(), v.size()));
    };
    return Profile(RadialGrid(vec(j.at("r")), j.at("grid").at("stretch").get<double>()), vec(j.at("u")),
                   vec(j.at("du")), meta);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("malformed profile JSON: ") + e.what());
  }
}

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

json to_json(const CheckReport& r) {
  return {{"name", r.name},       {"sup_residual", number(r.sup_residual)}, {"tolerance", r.tolerance},
          {"order_estimate", number(r.order_estimate)}, {"pass", r.pass}, {"method", r.method},
          {"note", r.note}};
}

CheckReport check_report_from_json(const json& j) {
  CheckReport r;
  r.name = j.at("name").get<std::string>();
  r.sup_residual = number_from(j.at("sup_residual"));
  r.tolerance = j.at("tolerance").get<double>();
  r.order_estimate = number_from(j.at("order_estimate"));
  r.pass = j.at("pass").get<bool>();
  r.method = j.value("method", "");
  r.note = j.value("note", "");
  return r;
}

json to_json(const ShootingResult& r, int n, double tau, double decay_M) {
  const auto& g = r.profile.grid();
  json scan = json::array();
  for (const auto& row : r.scan) scan.push_back({{"a", row.a}, {"slope", number(row.slope)}});
  return {{"n", n},
          {"tau", tau},
          {"a", r.a},
          {"residual_sup", r.residual_sup},
          {"slope_error", r.slope_error},
          {"decay_M", number(decay_M)},
          {"iterations", r.iterations},
          {"grid", {{"N", g.intervals()}, {"r_max", g.r_max()}, {"stretch", g.stretch()}}},
          {"scan", scan}};
}

json to_json(const EntropyReport& r) {
  return {{"lambda", r.lambda},
          {"lambda_upper", r.lambda_upper},
          {"f_identity", r.f_identity},
          {"argmax_scale", r.argmax_scale},
          {"argmax_center", {r.argmax_center.axial, r.argmax_center.off}},
          {"quad_error", r.quad_error},
          {"tail_bracket", r.tail_bracket},
          {"search_radius", r.search_radius},
          {"boundary_hit", r.boundary_hit},
          {"evaluations", r.evaluations}};
}

json to_json(const Dossier& d) {
  json checks = json::array();
  for (const auto& c : d.checks) checks.push_back(to_json(c));
  json pinch = json::array();
  for (const auto& p : d.pinching) pinch.push_back({{"t", p.t}, {"theta", p.theta}, {"margin", number(p.margin)}});
  return {{"n", d.n},
          {"theta0", d.theta0},
          {"t_cut", d.t_cut},
          {"extinction", number(d.extinction)},
          {"theta_cut", d.theta_cut},
          {"tau", d.tau},
          {"a", d.a},
          {"lambda_expander", d.lambda_expander},
          {"lambda_cone", d.lambda_cone},
          {"flat", d.flat},
          {"pass", d.pass},
          {"failed_stage", d.failed_stage},
          {"pinching", pinch},
          {"checks", checks},
          {"external_assumption", "entropy-class compactness relies on an assumption about minimal cones "
                                  "that this tool does not check"}};
}

namespace {

constexpr const char* kSweepHeader = "parameter,distance,distance_c1,a,lambda,extra,pass_count,status";

}  // namespace

void write_sweep_csv(const SweepTable& t, const fs::path& path) {
  auto out = open_out(path);
  out << "# expanderlab sweep name=" << t.name << '\n';
  for (const auto& [k, v] : t.summary) out << "# summary " << k << '=' << fmt(v) << '\n';
  out << kSweepHeader << '\n';
  for (const auto& r : t.rows)
    out << fmt(r.parameter) << ',' << fmt(r.distance) << ',' << fmt(r.distance_c1) << ',' << fmt(r.a) << ','
        << fmt(r.lambda) << ',' << fmt(r.extra) << ',' << r.pass_count << ',' << r.status << '\n';
}

SweepTable read_sweep_csv(const fs::path& path) {
  auto in = open_in(path);
  SweepTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# summary ", 0) == 0) {
      for (const auto& [k, v] : parse_comment(line)) t.summary.push_back({k, parse_double(v)});
      continue;
    }
    if (line[0] == '#') {
      const auto kv = parse_comment(line);
      if (kv.count("name")) t.name = kv.at("name");
      continue;
    }
    if (!header) {
      require(line == kSweepHeader, ErrorKind::io, "unexpected sweep header in " + path.string());
      header = true;
      continue;
    }
    const auto c = split(line, ',');
    require(c.size() == 8, ErrorKind::io, "expected 8 columns: '" + line + "'");
    SweepRow r;
    r.parameter = parse_double(c[0]);
    r.distance = parse_double(c[1]);
    r.distance_c1 = parse_double(c[2]);
    r.a = parse_double(c[3]);
    r.lambda = parse_double(c[4]);
    r.extra = parse_double(c[5]);
    r.pass_count = std::stoi(c[6]);
    r.status = c[7];
    t.rows.push_back(r);
  }
  return t;
}

json to_json(const SweepTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"parameter", r.parameter},   {"distance", number(r.distance)},
                    {"distance_c1", number(r.distance_c1)}, {"a", number(r.a)},
                    {"lambda", number(r.lambda)}, {"extra", number(r.extra)},
                    {"pass_count", r.pass_count}, {"status", r.status}});
  json summary = json::array();
  for (const auto& [k, v] : t.summary) summary.push_back({k, number(v)});
  return {{"name", t.name}, {"rows", rows}, {"summary", summary}};
}

SweepTable sweep_from_json(const json& j) {
  SweepTable t;
  t.name = j.at("name").get<std::string>();
  for (const auto& r : j.at("rows")) {
    SweepRow row;
    row.parameter = r.at("parameter").get<double>();
    row.distance = number_from(r.at("distance"));
    row.distance_c1 = number_from(r.at("distance_c1"));
    row.a = number_from(r.at("a"));
    row.lambda = number_from(r.at("lambda"));
    row.extra = number_from(r.at("extra"));
    row.pass_count = r.at("pass_count").get<int>();
    row.status = r.at("status").get<std::string>();
    t.rows.push_back(row);
  }
  for (const auto& s : j.at("summary")) t.summary.push_back({s.at(0).get<std::string>(), number_from(s.at(1))});
  return t;
}

void write_flow_csv(const std::vector<FlowState>& states, const fs::path& path) {
  auto out = open_out(path);
  out << "t,r,u\n";
  for (const auto& s : states)
    for (Eigen::Index i = 0; i < s.profile.size(); ++i)
      out << fmt(s.t) << ',' << fmt(s.profile.r()[i]) << ',' << fmt(s.profile.u()[i]) << '\n';
}

void write_curvature_csv(const SurfaceSample& s, const fs::path& path) {
  auto out = open_out(path);
  out << "r,W,kappa_m,kappa_p,H,A2,ratio\n";
  const Vector ratio = s.ratio();
  for (Eigen::Index i = 0; i < s.r.size(); ++i)
    out << fmt(s.r[i]) << ',' << fmt(s.W[i]) << ',' << fmt(s.kappa_m[i]) << ',' << fmt(s.kappa_p[i]) << ','
        << fmt(s.H[i]) << ',' << fmt(s.A2[i]) << ',' << fmt(ratio[i]) << '\n';
}

void write_json(const json& j, const fs::path& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, path.string() + ": " + e.what());
  }
}

void emit_plot_data(const fs::path& artifact, std::string_view kind, const fs::path& out_path) {
  if (kind != "profile" && kind != "sweep" && kind != "flow" && kind != "curvature")
    throw Error(ErrorKind::unknown_kind, "plot kind '" + std::string(kind) + "'");
  require(fs::exists(artifact), ErrorKind::io, "no such artifact " + artifact.string());
  auto out = open_out(out_path);
  if (kind == "profile") {
    const Profile p = read_profile_csv(artifact);
    out << "# r u\n";
    for (Eigen::Index i = 0; i < p.size(); ++i) out << fmt(p.r()[i]) << ' ' << fmt(p.u()[i]) << '\n';
  } else if (kind == "sweep") {
    const SweepTable t = read_sweep_csv(artifact);
    out << "# parameter distance\n";
    for (const auto& r : t.rows) out << fmt(r.parameter) << ' ' << fmt(r.distance) << '\n';
  } else {
    auto in = open_in(artifact);
    std::string line;
    std::getline(in, line);
    const auto cols = split(line, ',');
    out << '#';
    for (const auto& c : cols) out << ' ' << c;
    out << '\n';
    std::string last_t;
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split(line, ',');
      // flow files: one block per time stamp
      if (kind == "flow" && !first && cells[0] != last_t) out << "\n";
      last_t = cells[0];
      first = false;
      for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? " " : "") << cells[k];
      out << '\n';
    }
  }
}

}  // namespace expanderlab
