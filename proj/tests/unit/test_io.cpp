#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"

#include "expanderlab/io.hpp"

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

struct Scratch {
  fs::path dir;
  Scratch() {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("expanderlab_io_" + std::to_string(rd()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

void same_profile(const Profile& a, const Profile& b) {
  CHECK(a.grid() == b.grid());
  CHECK(a.u() == b.u());
  CHECK(a.du() == b.du());
  CHECK(a.meta() == b.meta());
}

SweepTable sample_table() {
  SweepTable t;
  t.name = "demo";
  SweepRow a;
  a.parameter = 1.5;
  a.distance = 0.1;
  a.distance_c1 = 1.0 / 3.0;
  a.a = 2.0;
  a.pass_count = 3;
  SweepRow b = a;
  b.parameter = 1.25;
  b.status = "bracket_failure";
  t.rows = {a, b};
  t.summary = {{"a_limit", 1.7090957453038178}, {"fit_C", M_PI}};
  return t;
}

void same_table(const SweepTable& a, const SweepTable& b) {
  CHECK(a.name == b.name);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].parameter == b.rows[i].parameter);
    CHECK(a.rows[i].distance == b.rows[i].distance);
    CHECK(a.rows[i].distance_c1 == b.rows[i].distance_c1);
    CHECK(a.rows[i].a == b.rows[i].a);
    CHECK(std::isnan(b.rows[i].lambda));
    CHECK(a.rows[i].pass_count == b.rows[i].pass_count);
    CHECK(a.rows[i].status == b.rows[i].status);
  }
  CHECK(a.summary == b.summary);
}

}  // namespace

TEST_CASE("profile csv round trip is exact") {
  Scratch tmp;
  const auto g = make_radial_grid(64, 12.0, 1.02);
  for (const auto& p : {cone_profile({3, 0.7}, g), cone_profile({2, 0.0}, make_radial_grid(32, 1.0, 1.0))}) {
    write_profile_csv(p, tmp / "p.csv");
    same_profile(p, read_profile_csv(tmp / "p.csv"));
  }
  const Vector u = g.nodes().array().cos().matrix();
  ProfileMeta meta;
  meta.kind = ProfileKind::flow;
  meta.time = 0.125;
  meta.expander_dim = 2;
  const Profile p(g, u, (-g.nodes().array().sin()).matrix(), meta);
  write_profile_csv(p, tmp / "q.csv");
  same_profile(p, read_profile_csv(tmp / "q.csv"));
}

TEST_CASE("plain csv without metadata") {
  Scratch tmp;
  {
    std::ofstream f(tmp / "plain.csv");
    f << "r,u,du\r\n";
    for (int i = 0; i <= 16; ++i) f << 0.5 * i << ",0,0\r\n";
  }
  const auto p = read_profile_csv(tmp / "plain.csv");
  CHECK(p.size() == 17);
  CHECK(p.grid().stretch() == 1.0);
  CHECK(p.meta().kind == ProfileKind::sampled);
}

TEST_CASE("malformed profile files") {
  Scratch tmp;
  CHECK(kind_of([&] { read_profile_csv(tmp / "missing.csv"); }) == ErrorKind::io);
  {
    std::ofstream f(tmp / "bad.csv");
    f << "x,y\n1,2\n";
  }
  CHECK(kind_of([&] { read_profile_csv(tmp / "bad.csv"); }) == ErrorKind::io);
  {
    std::ofstream f(tmp / "short.csv");
    f << "r,u,du\n0,1\n";
  }
  CHECK(kind_of([&] { read_profile_csv(tmp / "short.csv"); }) == ErrorKind::io);
  CHECK(kind_of([] { profile_from_json(json{{"kind", "cone"}}); }) == ErrorKind::io);
}

TEST_CASE("profile json round trip") {
  const auto p = cone_profile({2, 1.25}, make_radial_grid(48, 6.0, 1.01));
  const json j = to_json(p);
  CHECK(j["cone"]["tau"] == 1.25);
  same_profile(p, profile_from_json(json::parse(j.dump())));
}

TEST_CASE("check reports keep non-finite residuals") {
  auto r = CheckReport::make("demo", NAN, 1e-3, "ode", "note");
  r.order_estimate = 2.5;
  const auto back = check_report_from_json(json::parse(to_json(r).dump()));
  CHECK(back.name == "demo");
  CHECK(std::isnan(back.sup_residual));
  CHECK(back.tolerance == 1e-3);
  CHECK(back.order_estimate == 2.5);
  CHECK_FALSE(back.pass);
  CHECK(back.method == "ode");
  CHECK(back.note == "note");
}

TEST_CASE("sweep tables round trip through csv and json") {
  Scratch tmp;
  const auto t = sample_table();
  write_sweep_csv(t, tmp / "s.csv");
  same_table(t, read_sweep_csv(tmp / "s.csv"));
  same_table(t, sweep_from_json(json::parse(to_json(t).dump())));
}

TEST_CASE("json files") {
  Scratch tmp;
  write_json({{"x", 1}}, tmp / "sub" / "a.json");
  CHECK(read_json(tmp / "sub" / "a.json")["x"] == 1);
  {
    std::ofstream f(tmp / "broken.json");
    f << "{";
  }
  CHECK(kind_of([&] { read_json(tmp / "broken.json"); }) == ErrorKind::io);
}

TEST_CASE("plot data") {
  Scratch tmp;
  write_profile_csv(cone_profile({2, 1.0}, make_radial_grid(16, 1.0, 1.0)), tmp / "p.csv");
  emit_plot_data(tmp / "p.csv", "profile", tmp / "p.dat");
  std::ifstream in(tmp / "p.dat");
  std::string line;
  std::getline(in, line);
  CHECK(line == "# r u");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 17);

  const auto g = make_radial_grid(16, 1.0, 1.0);
  FlowState s1, s2;
  s1.t = 0.5;
  s1.profile = cone_profile({2, 1.0}, g);
  s2.t = 1.0;
  s2.profile = cone_profile({2, 1.0}, g);
  write_flow_csv({s1, s2}, tmp / "f.csv");
  emit_plot_data(tmp / "f.csv", "flow", tmp / "f.dat");
  std::ifstream fin(tmp / "f.dat");
  int blanks = 0;
  while (std::getline(fin, line)) blanks += line.empty();
  CHECK(blanks == 1);

  CHECK(kind_of([&] { emit_plot_data(tmp / "p.csv", "histogram", tmp / "x.dat"); }) == ErrorKind::unknown_kind);
  CHECK(kind_of([&] { emit_plot_data(tmp / "none.csv", "profile", tmp / "x.dat"); }) == ErrorKind::io);
}
