#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wgl/errors.hpp"
#include "wgl/experiments.hpp"

using namespace wgl;
using Catch::Matchers::WithinAbs;
using nlohmann::json;

namespace {

std::vector<double> pow2_grid(int a, int b) {
  std::vector<double> g;
  for (int k = a; k <= b; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("slope fit on synthetic data", "[fit]") {
  auto x = pow2_grid(1, 10);
  std::vector<double> sq, pert, flat;
  for (double e : x) {
    sq.push_back(e * e);
    pert.push_back(e * (1.0 + 0.1 * e));
    flat.push_back(3.0);
  }
  auto a = fit_slope(x, sq);
  REQUIRE(a.ok);
  CHECK_THAT(a.slope, WithinAbs(2.0, 1e-12));
  CHECK(a.half_width < 1e-12);

  auto b = fit_slope(x, pert);
  REQUIRE(b.ok);
  CHECK(b.slope >= 0.98);
  CHECK(b.slope <= 1.02);
  CHECK(b.count >= 4);

  auto c = fit_slope(x, flat);
  REQUIRE(c.ok);
  CHECK_THAT(c.slope, WithinAbs(0.0, 1e-12));
}

TEST_CASE("slope fit windows and guards", "[fit]") {
  auto x = pow2_grid(1, 8);
  std::vector<double> y;
  for (double e : x) y.push_back(e);
  auto d = fit_slope(x, y, {WindowPolicy::Kind::DropLeading, 2});
  REQUIRE(d.ok);
  CHECK(d.first == 2);
  CHECK(d.count == 6);

  auto few = fit_slope({0.5, 0.25, 0.125}, {1.0, 0.5, 0.25});
  CHECK_FALSE(few.ok);
  CHECK_FALSE(few.error.empty());

  std::vector<double> holes = y;
  holes[1] = std::nan("");
  holes[3] = 0.0;
  auto h = fit_slope(x, holes);
  REQUIRE(h.ok);
  CHECK_THAT(h.slope, WithinAbs(1.0, 1e-12));

  auto too_many = fit_slope(x, y, {WindowPolicy::Kind::DropLeading, 6});
  CHECK_FALSE(too_many.ok);

  // noisy data: the half-width covers the scatter
  std::vector<double> noisy;
  for (std::size_t i = 0; i < x.size(); ++i) noisy.push_back(x[i] * (i % 2 ? 1.1 : 0.9));
  auto n = fit_slope(x, noisy, {WindowPolicy::Kind::DropLeading, 0});
  REQUIRE(n.ok);
  CHECK(n.half_width > 0.0);
  CHECK(std::abs(n.slope - 1.0) < 2.0 * n.half_width + 0.05);
}

TEST_CASE("config parsing helpers", "[config]") {
  CHECK(parse_complex("0.5+1i") == cplx{0.5, 1.0});
  CHECK(parse_complex("i") == cplx{0.0, 1.0});
  CHECK(parse_complex("-2") == cplx{-2.0, 0.0});
  CHECK(parse_complex("1-0.25i") == cplx{1.0, -0.25});
  CHECK(parse_complex("1,2") == cplx{1.0, 2.0});
  CHECK(parse_complex("-i") == cplx{0.0, -1.0});
  CHECK_THROWS_AS(parse_complex("1+2k"), ValidationError);
  CHECK_THROWS_AS(parse_complex(""), ValidationError);

  auto g = parse_grid("pow2:2:4");
  REQUIRE(g.size() == 3);
  CHECK(g[0] == 0.25);
  CHECK(g[2] == 0.0625);
  CHECK(parse_grid("0.5, 0.25").size() == 2);
  CHECK_THROWS_AS(parse_grid("pow2:4"), ValidationError);

  auto r = parse_delta_rule("power:1.5");
  CHECK(r.kind == DeltaRule::Kind::Power);
  CHECK(r.value == 1.5);
  CHECK(parse_delta_rule("power 2.5").value == 2.5);
  auto f = parse_delta_rule("fixed-ratio:0.5");
  CHECK(f.kind == DeltaRule::Kind::FixedRatio);
  CHECK(f.apply(0.2) == 0.1);
  CHECK_THAT(r.apply(0.04), WithinAbs(0.008, 1e-15));
  CHECK_THROWS_AS(parse_delta_rule("cube:3"), ValidationError);
}

TEST_CASE("config validation", "[config]") {
  json ok{{"kind", "residual"}, {"profile", "bump:0.5"}, {"eps_grid", "pow2:2:5"}, {"delta_rule", "power:1.5"}};
  CHECK_NOTHROW(config_from_json(ok));

  auto with = [&](const char* key, json v) {
    json j = ok;
    j[key] = v;
    return j;
  };
  CHECK_THROWS_AS(config_from_json(with("eps_grid", json::array())), ValidationError);
  CHECK_THROWS_AS(config_from_json(with("eps_grid", json::array({0.1, 0.2, 0.05}))), ValidationError);
  CHECK_THROWS_AS(config_from_json(with("delta_rule", "power:0.8")), ValidationError);
  CHECK_THROWS_AS(config_from_json(with("delta_rule", "fixed-ratio:1.5")), ValidationError);
  CHECK_THROWS_AS(config_from_json(with("z", 2.0)), ValidationError);
  CHECK_THROWS_AS(config_from_json(with("n", 0)), ValidationError);
  CHECK_THROWS_AS(config_from_json(with("kind", "dance")), ValidationError);
  CHECK_THROWS_AS(config_from_json(with("epslion", 0.1)), ValidationError);
  CHECK_THROWS_AS(config_from_json(with("profile", "bump:1.5")), ValidationError);
  CHECK_THROWS_AS(config_from_json(json::array()), ValidationError);

  auto cfg = config_from_json(with("z", json{{"re", 1.0}, {"im", 2.0}}));
  CHECK(cfg.z == cplx{1.0, 2.0});
  CHECK(config_from_json(with("z", json::array({0.0, 1.0}))).z == cplx{0.0, 1.0});
}

TEST_CASE("config round trip", "[config]") {
  json j{{"kind", "graph-limit"}, {"profile", "bump:0.3"}, {"z", "0.5+2i"}, {"n", 2},
         {"eps_grid", json::array({0.25, 0.125, 0.0625, 0.03125})}, {"delta_rule", "fixed-ratio:0.5"},
         {"window", {{"kind", "drop"}, {"count", 1}}}, {"seed", 9}};
  auto a = config_from_json(j);
  auto b = config_from_json(to_json(a));
  CHECK(to_json(a) == to_json(b));
  CHECK(b.n == 2);
  CHECK(b.window.kind == WindowPolicy::Kind::DropLeading);
  CHECK(b.window.drop == 1);
  CHECK(b.seed == 9);
}

TEST_CASE("worker count honours the environment", "[sweep]") {
  ::setenv("WGL_THREADS", "3", 1);
  CHECK(worker_count() <= 3);
  CHECK(worker_count(1) == 1);
  ::setenv("WGL_THREADS", "0", 1);
  CHECK_THROWS_AS(worker_count(), ValidationError);
  ::setenv("WGL_THREADS", "two", 1);
  CHECK_THROWS_AS(worker_count(), ValidationError);
  ::unsetenv("WGL_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("coupling sweep", "[sweep]") {
  json j{{"kind", "coupling"}, {"profile", "zero"}, {"z", "i"}, {"eps_grid", "pow2:6:14"},
         {"p", json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0})})},
         {"window", {{"kind", "drop"}, {"count", 2}}}};
  auto r = run_sweep(config_from_json(j));
  CHECK(r.resonant);
  CHECK(r.failures.empty());
  REQUIRE(r.rows.size() == 9);
  CHECK(r.rows.front().epsilon > r.rows.back().epsilon);
  auto f = r.fit("dev_q");
  REQUIRE(f.ok);
  CHECK_THAT(f.slope, WithinAbs(1.0, 0.15));
  CHECK(r.column("dev_q").size() == 9);
  CHECK_THROWS_AS(r.column("nope"), ValidationError);
}

TEST_CASE("residual sweep with the generic preset", "[sweep]") {
  // delta = eps^{3/2} makes the bound shape delta/eps^{3/2} constant: the residual
  // levels off once eps^2 |z| is well below |lambda_1| = 0.031.
  json j{{"kind", "residual"}, {"profile", "bump:0.5"}, {"z", "1+1i"}, {"eps_grid", "pow2:7:14"},
         {"delta_rule", "power:1.5"}, {"window", {{"kind", "drop"}, {"count", 0}}}};
  auto r = run_sweep(config_from_json(j));
  CHECK_FALSE(r.resonant);
  auto h = r.column("residual_Hnorm");
  auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  CHECK(*hi / *lo < 1.1);
  auto flat = r.fit("residual_Hnorm");
  REQUIRE(flat.ok);
  CHECK(std::abs(flat.slope) < 0.05);

  // strictly below eps^{3/2} the residual goes to zero at the excess rate
  j["delta_rule"] = "power:1.75";
  auto s = run_sweep(config_from_json(j));
  auto h2 = s.column("residual_Hnorm");
  CHECK(h2.back() < h2.front());
  auto f = s.fit("residual_Hnorm");
  REQUIRE(f.ok);
  CHECK_THAT(f.slope, WithinAbs(0.25, 0.05));
}

TEST_CASE("sweep output is reproducible and self-describing", "[sweep]") {
  json j{{"kind", "graph-limit"}, {"profile", "bump:0.5"}, {"eps_grid", "pow2:2:7"}, {"delta_rule", "power:2"},
         {"threads", 1}};
  auto a = run_sweep(config_from_json(j));
  j["threads"] = 4;
  auto b = run_sweep(config_from_json(j));
  auto ca = csv_of(a), cb = csv_of(b);
  // the thread count is part of the embedded config; everything else must match bit for bit
  auto strip = [](std::string s) {
    auto p = s.find("\"threads\":");
    return s.replace(p, s.find_first_of(",}", p) - p, "");
  };
  CHECK(strip(ca) == strip(cb));
  CHECK(csv_of(run_sweep(config_from_json(j))) == cb);

  CHECK(ca.find("# schema_version: 1") == 0);
  CHECK(ca.find("# config: {") != std::string::npos);
  CHECK(ca.find("epsilon,delta,comparison_norm") != std::string::npos);
  auto js = to_json(a);
  CHECK(js["schema_version"] == kSchemaVersion);
  CHECK(js["config"]["kind"] == "graph-limit");
  CHECK(js["rows"].size() == 6);
}

TEST_CASE("sweep writes its files", "[sweep]") {
  auto dir = std::filesystem::temp_directory_path() / "wgl_sweep_test";
  std::filesystem::create_directories(dir);
  json j{{"kind", "coupling"}, {"profile", "bump:0.5"}, {"eps_grid", "pow2:3:7"},
         {"output", {{"csv", (dir / "c.csv").string()}, {"json", (dir / "c.json").string()}}}};
  auto r = run_sweep(config_from_json(j));
  std::ifstream jin(dir / "c.json");
  auto back = json::parse(jin);
  CHECK(back["schema_version"] == 1);
  CHECK(back["config"]["eps_grid"].size() == 5);
  std::ifstream cin(dir / "c.csv");
  std::stringstream ss;
  ss << cin.rdbuf();
  CHECK(ss.str() == csv_of(r));
  std::filesystem::remove_all(dir);
}

TEST_CASE("delta sweep at fixed epsilon", "[sweep]") {
  json j{{"kind", "residual"}, {"profile", "bump:0.5"}, {"sweep", "delta"}, {"epsilon", 0.2},
         {"delta_grid", json::array({0.2, 0.1, 0.05, 0.025, 0.0125})}};
  auto r = run_sweep(config_from_json(j));
  REQUIRE(r.rows.size() == 5);
  for (const auto& row : r.rows) CHECK(row.epsilon == 0.2);
  auto f = r.fit("residual_Hnorm");
  REQUIRE(f.ok);
  CHECK_THAT(f.slope, WithinAbs(1.0, 0.1));
  j["delta_grid"] = json::array({0.3, 0.1, 0.05, 0.025});
  CHECK_THROWS_AS(config_from_json(j), ValidationError);
}

TEST_CASE("oracle report on a coarse grid", "[oracle]") {
  json j{{"kind", "oracle"}, {"profile", "zero"}, {"z", "i"}, {"epsilon", 0.3}, {"delta_rule", "power:3"},
         {"oracle", {{"h_s", 0.125}, {"u_cells", 8}, {"refine", true}}}};
  auto cfg = config_from_json(j);
  auto rep = run_oracle(cfg);
  CHECK(rep.resonant);
  CHECK(rep.solver_residual <= 1e-10);
  CHECK(rep.resolvent_bound <= 1.05);
  CHECK(rep.refinement_factor > 1.0);
  auto js = to_json(rep, cfg);
  for (const char* key : {"grid", "tolerances", "norms", "mismatch", "refinement_factor", "config"})
    CHECK(js.contains(key));
}
