#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "occm/experiment.hpp"

using namespace occm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "occm_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + OCCM_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Json gaussian_1d(double center, double h = 0.1) {
  const auto g = GridSpec::covering(h, Coord{center - 6}, Coord{center + 6});
  return io::to_json(gaussian_measure(g, Coord{center}, 1.0).measure);
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_config(Json::array()), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"params", Json::object()}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"command", "nope"}}), ConfigError);
  try {
    parse_config(Json{{"command", "pekar"}, {"colour", 1}});
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "/colour");
  }
  CHECK_THROWS_AS(parse_config(Json{{"command", "tilt"}}), ConfigError);
  CHECK_NOTHROW(parse_config(Json{{"command", "tilt"}, {"seed", 3}}));
  CHECK_THROWS_AS(parse_config(Json{{"command", "tilt"}, {"seed", -3}}), ConfigError);
  CHECK_NOTHROW(parse_config(Json{{"command", "pekar"}}));
  for (const auto& c : known_commands()) CHECK(is_stochastic(c) == (c == "fk-check" || c == "khasminskii" || c == "tilt" || c == "tube" || c == "free-energy"));

  const auto cfg = parse_config(Json{{"command", "pekar"}, {"params", {{"mass", 1.0}, {"bogus", 2}}}});
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  const auto neg = parse_config(Json{{"command", "pekar"}, {"params", {{"mass", -1.0}}}});
  CHECK_THROWS_AS(run_experiment(neg), ConfigError);
}

TEST_CASE("config round trip") {
  const Json j{{"command", "tilt"}, {"params", {{"t", 1.0}}}, {"seed", 9}, {"output", "x.json"}};
  CHECK(config_to_json(parse_config(j)) == j);
}

TEST_CASE("metric with inline collections") {
  const Json a{{"components", {gaussian_1d(0.0)}}};
  const Json b{{"components", {gaussian_1d(0.0)}}};
  auto cfg = parse_config(Json{{"command", "metric"}, {"params", {{"a", a}, {"b", b}, {"r_max", 8}}}});
  auto r = run_experiment(cfg);
  CHECK(r.result.at("value").get<double>() == doctest::Approx(0.0).epsilon(1e-12));

  // Translates are the same orbit.
  cfg.params["b"] = Json{{"components", {gaussian_1d(3.0)}}};
  r = run_experiment(cfg);
  CHECK(std::abs(r.result.at("value").get<double>()) < 1e-6);

  cfg.params["b"] = Json::array();
  r = run_experiment(cfg);
  CHECK(r.result.at("value").get<double>() > 0.0);
}

TEST_CASE("pekar writes a profile table") {
  const auto out = scratch("pekar.json");
  fs::remove(out);
  fs::remove(scratch("pekar_profile.csv"));
  const auto cfg = parse_config(Json{{"command", "pekar"}, {"params", {{"mass", 1.0}, {"n", 600}}}, {"output", out.string()}});
  std::ostringstream log;
  CHECK(run(cfg, log) == kExitOk);
  std::ifstream in(out);
  const auto doc = Json::parse(in);
  CHECK(doc.contains("metadata"));
  CHECK(doc.at("result").at("converged").get<bool>());
  CHECK(doc.at("config").at("command") == "pekar");
  std::ifstream csv(scratch("pekar_profile.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "r,psi");
}

TEST_CASE("invalid runs write nothing") {
  const auto out = scratch("bad.json");
  fs::remove(out);
  const auto cfg = parse_config(Json{{"command", "rate"}, {"params", {{"dim", 7}}}, {"output", out.string()}});
  std::ostringstream log;
  CHECK(run(cfg, log) == kExitInvalid);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("reproduce") {
  CHECK(reproduce(Json{{"criteria", Json::array()}}).all_pass());
  CHECK_THROWS_AS(reproduce(Json::object()), ConfigError);

  Json crit{{"name", "gauss"},
            {"config", {{"command", "rate"}, {"params", {{"variance", 1.0}}}}},
            {"checks", Json::array({Json{{"path", "/result/relative_error"}, {"op", "<="}, {"value", 0.01}},
                                    Json{{"path", "/result/rate/infinite"}, {"op", "false"}},
                                    Json{{"path", "/result/rate/value"}, {"op", "rel"}, {"ref", "/result/closed_form"}, {"tol", 0.01}}})}};
  auto rep = reproduce(Json{{"criteria", {crit}}});
  CHECK(rep.all_pass());
  REQUIRE(rep.bodies.size() == 1);
  CHECK(rep.bodies[0] == reproduce(Json{{"criteria", {crit}}}).bodies[0]);

  crit["checks"][0]["value"] = 1e-9;
  rep = reproduce(Json{{"criteria", {crit}}});
  CHECK_FALSE(rep.all_pass());

  crit["checks"] = Json::array({Json{{"path", "/result/missing"}, {"op", "true"}}});
  CHECK_FALSE(reproduce(Json{{"criteria", {crit}}}).all_pass());
}

TEST_CASE("binary exit codes") {
  const auto empty = scratch("empty_manifest.json");
  write(empty, R"({"criteria": []})");
  CHECK(cli("reproduce \"" + empty.string() + "\"") == 0);

  const auto tight = scratch("tight_manifest.json");
  write(tight, R"({"criteria": [{"name": "pekar", "config": {"command": "pekar", "params": {"profile": false}},
                  "checks": [{"path": "/result/energy", "op": "<", "value": 0}]}]})");
  CHECK(cli("reproduce \"" + tight.string() + "\"") == 1);

  const auto broken = scratch("broken.json");
  write(broken, "{ not json");
  CHECK(cli("run \"" + broken.string() + "\"") == 2);
  CHECK(cli("reproduce \"" + broken.string() + "\"") == 2);

  const auto out = scratch("cli_out.json");
  fs::remove(out);
  CHECK(cli("pekar --mass -1 --out \"" + out.string() + "\"") == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(cli("tilt --t 1") == 2);  // seed missing
  CHECK(cli("pekar --set nonsense=1") == 2);
  CHECK(cli("no-such-command") == 2);
  CHECK(cli("--help") == 0);

  CHECK(cli("pekar --mass 1 --set profile=false --out \"" + out.string() + "\"") == 0);
  CHECK(fs::exists(out));
  // An iteration budget this small cannot converge.
  CHECK(cli("pekar --set max_iterations=1 --set profile=false --out \"" + out.string() + "\"") == 3);
}

TEST_CASE("three-Gaussian mixture") {
  const auto f = three_gaussian_mixture(10.0, 0.05);
  CHECK(total_mass(f.measure) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.limit.size() == 2);
  CHECK(total_mass(f.limit.components()[0]) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK_THROWS(three_gaussian_mixture(0.0, 0.05));
}
