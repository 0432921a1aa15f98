// occm: command-line front end.
//
//   occm <command> [--config FILE] [flags] [--set key=json]...
//   occm run CONFIG.json
//   occm reproduce MANIFEST.json
//
// Flags are shorthands for entries of the params table; a flag the command
// does not understand is a validation error (exit 2), like an unknown key in
// a config file.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "occm/experiment.hpp"

namespace {

using occm::Json;

struct CommandFlags {
  std::string config_file;
  std::vector<double> t;
  std::optional<double> dt, eps, beta, grid_h, mass;
  std::optional<long> chains, n_paths;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
};

void add_flags(CLI::App* sub, CommandFlags& f) {
  sub->add_option("--config", f.config_file, "JSON config; flags below override its params");
  sub->add_option("--t", f.t, "time horizon (several values for tube and free-energy)");
  sub->add_option("--dt", f.dt, "time step");
  sub->add_option("--eps", f.eps, "Coulomb smoothing eps > 0");
  sub->add_option("--beta", f.beta, "coupling multiplier on H");
  sub->add_option("--seed", f.seed, "RNG seed (required for stochastic commands)");
  sub->add_option("--chains", f.chains, "number of independent chains");
  sub->add_option("--grid-h", f.grid_h, "occupation grid spacing");
  sub->add_option("--mass", f.mass, "mass for pekar / tube");
  sub->add_option("--n-paths", f.n_paths, "Monte Carlo sample size");
  sub->add_option("--out", f.out, "result JSON path (CSV tables are written next to it); default stdout");
  sub->add_option("--set", f.sets, "extra param as key=JSON, e.g. --set r_max=32");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw occm::ConfigError("", "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw occm::ConfigError("", path + " is not valid JSON: " + e.what());
  }
}

Json build_config(const std::string& command, const CommandFlags& f) {
  Json cfg = f.config_file.empty() ? Json{{"command", command}} : read_json_file(f.config_file);
  if (!cfg.is_object()) throw occm::ConfigError("", "config must be a JSON object");
  cfg["command"] = command;
  Json& params = cfg["params"];
  if (params.is_null()) params = Json::object();
  if (!f.t.empty()) {
    const bool list = command == "tube" || command == "free-energy";
    const std::string key = list ? "t_list" : "t";
    params[key] = f.t.size() == 1 && !list ? Json(f.t[0]) : Json(f.t);
  }
  if (f.dt) params["dt"] = *f.dt;
  if (f.eps) params["eps"] = *f.eps;
  if (f.beta) params["beta"] = *f.beta;
  if (f.chains) params["chains"] = *f.chains;
  if (f.grid_h) params["grid_h"] = *f.grid_h;
  if (f.mass) params["mass"] = *f.mass;
  if (f.n_paths) params["n_paths"] = *f.n_paths;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw occm::ConfigError("--set", "expected key=value, got '" + s + "'");
    const auto key = s.substr(0, eq);
    const auto text = s.substr(eq + 1);
    try {
      params[key] = Json::parse(text);
    } catch (const Json::exception&) {
      params[key] = text;  // bare strings such as file names
    }
  }
  if (f.seed) cfg["seed"] = *f.seed;
  if (!f.out.empty()) cfg["output"] = f.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occupation-measure compactification toolkit"};
  app.require_subcommand(1);

  std::map<std::string, CommandFlags> flags;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help = {
      {"metric", "distance D between two collections of orbits"},
      {"peel", "concentration-compactness decomposition of a measure"},
      {"rate", "Donsker-Varadhan rate I of a measure"},
      {"pekar", "radial Pekar maximizer and rho(m)"},
      {"fk-check", "Monte Carlo check of the Feynman-Kac bound"},
      {"khasminskii", "Monte Carlo check of the Khasminskii bound"},
      {"tilt", "Coulomb-tilted path sampler"},
      {"tube", "distance of tilted occupation measures to the Pekar orbit"},
      {"free-energy", "(1/t) log Z_t by direct sampling"},
  };
  for (const auto& cmd : occm::known_commands()) {
    auto* sub = app.add_subcommand(cmd, help.at(cmd));
    add_flags(sub, flags[cmd]);
    subs[cmd] = sub;
  }

  std::string run_file, run_out, manifest;
  auto* run_cmd = app.add_subcommand("run", "run a JSON config");
  run_cmd->add_option("config", run_file, "config file")->required();
  run_cmd->add_option("--out", run_out, "override the config's output path");
  auto* repro = app.add_subcommand("reproduce", "rerun a manifest and compare against its tolerances");
  repro->add_option("manifest", manifest, "manifest file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : occm::kExitInvalid;
  }

  if (repro->parsed()) return occm::reproduce_file(manifest, std::cout);

  try {
    Json cfg_json;
    if (run_cmd->parsed()) {
      cfg_json = read_json_file(run_file);
      if (!run_out.empty()) cfg_json["output"] = run_out;
    } else {
      for (const auto& [cmd, sub] : subs) {
        if (sub->parsed()) cfg_json = build_config(cmd, flags[cmd]);
      }
    }
    const auto cfg = occm::parse_config(cfg_json);
    return occm::run(cfg, std::cerr);
  } catch (const occm::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return occm::kExitInvalid;
  }
}
