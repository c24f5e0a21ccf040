#include <doctest.h>

#include <cctype>
#include <json.hpp>
#include <string>
#include <variant>

#include "beamstring/report.hpp"
#include "beamstring/runner.hpp"

using namespace beamstring;
using nlohmann::json;

TEST_CASE("run configuration: defaults and full round trip") {
  const RunConfig minimal = parse_run_config(json{{"scenario", "certdemo"}});
  CHECK(minimal.scenario.name == "certdemo");
  CHECK(minimal.n_w == 12);
  CHECK(minimal.n_phi == 12);
  CHECK(minimal.integrator.dt == 1e-3);
  CHECK(std::holds_alternative<OpenLoop>(minimal.mode));
  CHECK(minimal.output_dir == "out");

  const json full = {
      {"scenario", "section4"},
      {"params", {{"b1", 0.4}}},
      {"disturbances", {{"d3", "zero"}, {"M1", 0.0}}},
      {"initial_condition", "zero"},
      {"modes", {8, 6}},
      {"beam_basis", "polynomial"},
      {"integrator",
       {{"dt", 5e-4}, {"t_end", 2.0}, {"scheme", "trapezoidal"}, {"record_stride", 4}}},
      {"boundary_mode", {{"type", "feedback"}, {"k1", 0.3}, {"k2", 0.7}}},
      {"verify", {"sandwich", "pointwise"}},
      {"strict_signs", false},
      {"output_dir", "elsewhere"},
      {"seed", 42},
  };
  const RunConfig cfg = parse_run_config(full);
  CHECK(cfg.scenario.params.b1 == 0.4);
  CHECK(cfg.scenario.params.a1 == 3.0);  // untouched published value
  CHECK(cfg.scenario.disturbances.d3.is_zero());
  CHECK(!cfg.scenario.disturbances.d4.is_zero());
  CHECK(!cfg.scenario.ic.w0);  // zeroed initial condition
  CHECK(cfg.n_w == 8);
  CHECK(cfg.n_phi == 6);
  CHECK(cfg.beam_basis == BeamBasisKind::Polynomial);
  CHECK(cfg.integrator.scheme == Scheme::TrapezoidalFirstOrder);
  CHECK(cfg.integrator.record_stride == 4);
  REQUIRE(std::holds_alternative<Feedback>(cfg.mode));
  CHECK(std::get<Feedback>(cfg.mode).k2 == 0.7);
  CHECK(cfg.verify.size() == 2);
  CHECK(cfg.output_dir == "elsewhere");
  CHECK(cfg.seed == 42);
}

TEST_CASE("run configuration: usage errors carry helpful messages") {
  CHECK_THROWS_AS(parse_run_config(json::array()), UsageError);
  CHECK_THROWS_AS(parse_run_config(json{{"scenarioo", "certdemo"}}), UsageError);
  CHECK_THROWS_AS(parse_run_config(json{{"scenario", "atlantis"}}), UsageError);
  CHECK_THROWS_AS(parse_run_config(json{{"modes", {4}}}), UsageError);
  CHECK_THROWS_AS(parse_run_config(json{{"beam_basis", "splines"}}), UsageError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"integrator", {{"dt", -1e-3}}}}), UsageError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"integrator", {{"Dt", 1e-3}}}}), UsageError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"integrator", {{"scheme", "leapfrog"}}}}), UsageError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"boundary_mode", {{"type", "bang-bang"}}}}), UsageError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"verify", {"sandwich", "vibes"}}}), UsageError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"disturbances", {{"d3", "unregistered"}}}}), UsageError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"initial_condition", "bump"}}), UsageError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"sweep", {{"modes", {3}}}}}), UsageError);

  try {
    parse_run_config(json{{"scenarioo", "x"}});
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("scenarioo") != std::string::npos);
  }
}

TEST_CASE("sweep grids parse into mode/dt lists") {
  const json j = {{"scenario", "certdemo"},
                  {"sweep",
                   {{"modes", {std::vector<int>{4, 4}, std::vector<int>{8, 8}}},
                    {"dts", {1e-3, 5e-4}}}}};
  const RunConfig cfg = parse_run_config(j);
  REQUIRE(cfg.sweep_modes.size() == 2);
  CHECK(cfg.sweep_modes[1][0] == 8);
  REQUIRE(cfg.sweep_dts.size() == 2);
  CHECK(cfg.sweep_dts[1] == 5e-4);
}

TEST_CASE("config hashing is stable under key reordering only") {
  const json a = {{"scenario", "certdemo"}, {"seed", 7}};
  const json b = {{"seed", 7}, {"scenario", "certdemo"}};
  const json c = {{"scenario", "certdemo"}, {"seed", 8}};
  CHECK(config_hash(a) == config_hash(b));  // nlohmann objects sort keys
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 16);
  for (char ch : config_hash(a)) CHECK(std::isxdigit(static_cast<unsigned char>(ch)));
}

TEST_CASE("params serialization round-trips through json") {
  const PhysicalParams p = {3.0, 0.3, 0.06, 0.04, 0.04, 5.0, 0.5, 0.08, 0.06, 0.06, 1.0};
  const PhysicalParams q = params_from_json(to_json(p));
  CHECK(q.a1 == p.a1);
  CHECK(q.q1 == p.q1);
  CHECK(q.l == p.l);
  CHECK_THROWS(params_from_json(json{{"a1", 1.0}}));  // missing required keys
}
