#include "occm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "occm/decompose.hpp"
#include "occm/error.hpp"
#include "occm/kernels.hpp"
#include "occm/pekar.hpp"
#include "occm/rate.hpp"
#include "occm/sampler.hpp"
#include "occm/test_family.hpp"

namespace occm {

namespace {

// Typed access to the params table. Every key read is remembered so that
// finish() can reject the ones nobody asked for.
class Params {
 public:
  explicit Params(const Json& j) : j_(j) {
    if (!j_.is_object()) throw ConfigError("/params", "must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double def) {
    used_.insert(key);
    if (!j_.contains(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    return v.get<double>();
  }

  long integer(const std::string& key, long def, long min = std::numeric_limits<long>::min()) {
    used_.insert(key);
    if (!j_.contains(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    const long x = v.get<long>();
    if (x < min) throw ConfigError(path(key), "must be >= " + std::to_string(min));
    return x;
  }

  double positive(const std::string& key, double def) {
    const double x = number(key, def);
    if (!(x > 0.0)) throw ConfigError(path(key), "must be > 0");
    return x;
  }

  bool flag(const std::string& key, bool def) {
    used_.insert(key);
    if (!j_.contains(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    used_.insert(key);
    if (!j_.contains(key)) return def;
    const auto& v = j_.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(path(key), "expected a number or an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(path(key) + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  /// Inline JSON, or a string naming a JSON file.
  Json document(const std::string& key) {
    used_.insert(key);
    const auto& v = j_.at(key);
    if (!v.is_string()) return v;
    std::ifstream in(v.get<std::string>());
    if (!in) throw ConfigError(path(key), "cannot open '" + v.get<std::string>() + "'");
    try {
      return Json::parse(in);
    } catch (const Json::exception& e) {
      throw ConfigError(path(key), std::string("not valid JSON: ") + e.what());
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) throw ConfigError(path(item.key()), "unknown parameter");
    }
  }

  static std::string path(const std::string& key) { return "/params/" + key; }

 private:
  const Json& j_;
  std::set<std::string> used_;
};

template <class Fn>
auto wrap_field(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoConvergence) throw;
    throw ConfigError(field, e.what());
  } catch (const Json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

TiltConfig tilt_config(Params& p, const ExperimentConfig& c) {
  TiltConfig t;
  t.eps = p.positive("eps", t.eps);
  t.beta = p.number("beta", t.beta);
  t.bridge_weight = p.number("bridge_weight", t.bridge_weight);
  t.n_sweeps = static_cast<int>(p.integer("n_sweeps", t.n_sweeps, 1));
  t.burn_in = static_cast<int>(p.integer("burn_in", t.burn_in, 0));
  t.thin = static_cast<int>(p.integer("thin", t.thin, 1));
  t.seed = *c.seed;
  wrap_field("/params", [&] {
    t.validate();
    return 0;
  });
  return t;
}

std::size_t steps_for(double t, double dt, const std::string& field) {
  const double n = std::round(t / dt);
  if (n < 2.0) throw ConfigError(field, "t / dt must be at least 2");
  return static_cast<std::size_t>(n);
}

Json run_metric(Params& p) {
  const int r_max = static_cast<int>(p.integer("r_max", 64, 1));
  const MetricParams mp{r_max};
  if (p.has("mixture_n")) {
    const auto ns = p.numbers("mixture_n", {});
    const double h = p.positive("h", 0.05);
    p.finish();
    Json rows = Json::array();
    std::vector<double> values;
    for (double n : ns) {
      if (!(n > 0.0)) throw ConfigError(Params::path("mixture_n"), "must be > 0");
      const auto fm = three_gaussian_mixture(n, h);
      const auto d = metric_D(Collection({fm.measure}), fm.limit, mp);
      values.push_back(d.value);
      auto row = io::to_json(d);
      row["n"] = n;
      rows.push_back(row);
    }
    return Json{{"sequence", rows}, {"values", values}, {"tail_bound", mp.tail_bound()}};
  }
  if (!p.has("a") || !p.has("b")) throw ConfigError("/params", "needs 'a' and 'b', or 'mixture_n'");
  const auto a = wrap_field(Params::path("a"), [&] { return io::collection_from_json(p.document("a")); });
  const auto b = wrap_field(Params::path("b"), [&] { return io::collection_from_json(p.document("b")); });
  p.finish();
  return io::to_json(wrap_field("/params", [&] { return metric_D(a, b, mp); }));
}

PeelParams peel_params(Params& p) {
  PeelParams pp;
  pp.probe_radius = p.positive("probe_radius", pp.probe_radius);
  pp.dust_threshold = p.number("dust_threshold", pp.dust_threshold);
  pp.annulus_gap = p.number("annulus_gap", pp.annulus_gap);
  pp.max_components = static_cast<int>(p.integer("max_components", pp.max_components, 0));
  pp.growth_factor = p.number("growth_factor", pp.growth_factor);
  wrap_field("/params", [&] {
    pp.validate();
    return 0;
  });
  return pp;
}

Json run_peel(Params& p) {
  const auto pp = peel_params(p);
  DiscreteMeasure m;
  if (p.has("mixture_n")) {
    const double n = p.positive("mixture_n", 40.0);
    m = three_gaussian_mixture(n, p.positive("h", 0.05)).measure;
  } else {
    if (!p.has("measure")) throw ConfigError("/params", "needs 'measure' or 'mixture_n'");
    m = wrap_field(Params::path("measure"), [&] { return io::measure_from_json(p.document("measure")); });
  }
  p.finish();
  const auto dec = peel(m, pp);
  auto j = io::peel_report(dec, pp.probe_radius);
  std::vector<double> masses;
  for (const auto& c : dec.components) masses.push_back(c.mass);
  j["component_masses"] = masses;
  j["n_components"] = masses.size();
  return j;
}

Json run_rate(Params& p) {
  RateParams rp;
  rp.jump_ratio_cap = p.positive("jump_ratio_cap", rp.jump_ratio_cap);
  rp.relative_floor = p.number("relative_floor", rp.relative_floor);
  const bool dual = p.flag("dual", false);
  DiscreteMeasure m;
  Json extra = Json::object();
  if (p.has("measure")) {
    m = wrap_field(Params::path("measure"), [&] { return io::measure_from_json(p.document("measure")); });
  } else {
    const int dim = static_cast<int>(p.integer("dim", 1, 1));
    if (dim > kMaxDim) throw ConfigError(Params::path("dim"), "must be 1, 2 or 3");
    const double var = p.positive("variance", 1.0);
    const double h = p.positive("h", std::sqrt(var) / 20.0);
    const double half = p.positive("half_width", 7.0 * std::sqrt(var));
    m = wrap_field("/params", [&] {
      return gaussian_measure(GridSpec::centered(dim, h, half), Coord(dim, 0.0), var).measure;
    });
    extra["closed_form"] = dim / (8.0 * var);
  }
  p.finish();
  Json j{{"rate", io::to_json(rate_I(m, rp))}, {"dirichlet_form", dirichlet_form(m)}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  if (extra.contains("closed_form") && j["rate"]["value"].is_number()) {
    j["relative_error"] = std::abs(j["rate"]["value"].get<double>() - extra["closed_form"].get<double>()) /
                          extra["closed_form"].get<double>();
  }
  if (dual) j["dual"] = io::to_json(dual_rate(m, dual_candidate_sweep(m)));
  return j;
}

Json run_pekar(Params& p, RunResult& out) {
  const double mass = p.positive("mass", 1.0);
  PekarParams pp;
  pp.n = static_cast<int>(p.integer("n", pp.n, 500));
  pp.r_max = p.number("r_max", pp.r_max);
  pp.tol = p.positive("tol", pp.tol);
  pp.max_iterations = static_cast<int>(p.integer("max_iterations", pp.max_iterations, 1));
  const bool with_profile = p.flag("profile", true);
  p.finish();
  const auto r = solve_pekar(mass, pp);
  const auto el = euler_lagrange_check(r.profile);
  auto j = io::to_json(r);
  if (!with_profile) {
    j.erase("r_grid");
    j.erase("psi");
  }
  j["euler_lagrange"] = Json{{"eigenvalue", el.eigenvalue}, {"distance", el.distance}};
  j["energy_over_mass_cubed"] = r.energy / (mass * mass * mass);
  out.tables.push_back({"_profile.csv", io::profile_csv(r.profile)});
  out.numerical_failure = !r.converged;
  return j;
}

TestPotential bump_potential(Params& p, int dim) {
  TestPotential g;
  g.c = p.positive("c", 1.0);
  Bump b;
  b.amplitude = p.number("amplitude", 1.0);
  b.width = p.positive("width", 1.0);
  b.radius = p.positive("radius", 2.0 * b.width);
  b.at = p.numbers("at", Coord(dim, 0.0));
  if (static_cast<int>(b.at.size()) != dim) throw ConfigError(Params::path("at"), "needs 3 coordinates");
  if (b.amplitude != 0.0) g.bumps.push_back(b);
  return g;
}

Json run_fk(Params& p, const ExperimentConfig& c) {
  const double dt = p.positive("dt", 0.01);
  const auto ts = p.numbers("t", {1.0});
  const auto n_paths = static_cast<std::size_t>(p.integer("n_paths", 100000, 2));
  const auto g = bump_potential(p, 3);
  p.finish();
  Json rows = Json::array();
  bool all = true;
  for (double t : ts) {
    auto row = io::to_json(fk_bound_check(g, n_paths, steps_for(t, dt, Params::path("t")), dt, *c.seed, 3));
    row["t"] = t;
    all = all && row["holds"].get<bool>();
    rows.push_back(row);
  }
  return Json{{"rows", rows}, {"all_hold", all}};
}

Json run_khasminskii(Params& p, const ExperimentConfig& c) {
  KhasminskiiParams kp;
  kp.n_paths = static_cast<std::size_t>(p.integer("n_paths", static_cast<long>(kp.n_paths), 2));
  kp.n_steps = static_cast<std::size_t>(p.integer("n_steps", static_cast<long>(kp.n_steps), 1));
  kp.lambda = p.number("lambda", kp.lambda);
  kp.seed = *c.seed;
  p.finish();
  const auto r = wrap_field("/params", [&] { return khasminskii_check(kp); });
  auto j = io::to_json(r);
  j["anchor_z"] = (r.first_moment0.estimate - 4.0 * inverse_three_halves_moment()) / r.first_moment0.std_error;
  j["moment_margin"] = r.bound + 3.0 * r.moment.std_error - r.moment.estimate;
  return j;
}

Json run_tilt(Params& p, const ExperimentConfig& c) {
  const double t = p.positive("t", 2.0);
  const double dt = p.positive("dt", 0.02);
  const int chains = static_cast<int>(p.integer("chains", 4, 1));
  const auto cfg = tilt_config(p, c);
  p.finish();
  const auto n = steps_for(t, dt, Params::path("t"));
  const auto out = tilted_sampler(cfg, n, dt, 3, chains);
  Json rows = Json::array();
  std::vector<double> energies, ybounds, terminal;
  for (const auto& ch : out) {
    rows.push_back(Json{{"acceptance", ch.acceptance}, {"energies", ch.energies}});
    energies.insert(energies.end(), ch.energies.begin(), ch.energies.end());
    for (const auto& s : ch.samples) {
      ybounds.push_back(y_eps_energy(s, cfg.eps).bound);
      const auto w = s.point(s.steps());
      terminal.push_back((w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) / 3.0);
    }
  }
  const double ne = static_cast<double>(energies.size());
  const double mean = kernels::sum(energies) / ne;
  double ss = 0.0;
  for (double e : energies) ss += (e - mean) * (e - mean);
  return Json{{"chains", rows},
              {"mean_energy", mean},
              {"energy_std_error", ne > 1 ? std::sqrt(ss / (ne - 1.0) / ne) : 0.0},
              {"terminal_variance_per_axis", kernels::sum(terminal) / static_cast<double>(terminal.size())},
              {"t", static_cast<double>(n) * dt},
              {"diagonal", dt / cfg.eps},
              {"mean_y_bound", kernels::sum(ybounds) / static_cast<double>(ybounds.size())}};
}

Json run_tube(Params& p, const ExperimentConfig& c, RunResult& out) {
  TubeParams tp;
  tp.t_list = p.numbers("t_list", tp.t_list);
  tp.dt = p.positive("dt", tp.dt);
  tp.chains = static_cast<int>(p.integer("chains", tp.chains, 1));
  tp.grid_h = p.positive("grid_h", tp.grid_h);
  tp.metric.r_max = static_cast<int>(p.integer("r_max", tp.metric.r_max, 1));
  tp.peel = peel_params(p);
  const double mass = p.positive("mass", 1.0);
  const auto cfg = tilt_config(p, c);
  p.finish();
  for (double t : tp.t_list) steps_for(t, tp.dt, Params::path("t_list"));
  const auto profile = solve_pekar(mass).profile;
  const auto rows = wrap_field("/params", [&] { return tube_experiment(cfg, tp, profile); });
  Json jr = Json::array();
  std::vector<double> medians;
  for (const auto& r : rows) {
    jr.push_back(io::to_json(r));
    medians.push_back(r.median);
  }
  out.tables.push_back({"_tube.csv", io::tube_csv(rows)});
  return Json{{"rows", jr}, {"medians", medians}};
}

Json run_free_energy(Params& p, const ExperimentConfig& c) {
  const auto ts = p.numbers("t_list", {2.0, 4.0, 8.0});
  const double dt = p.positive("dt", 0.02);
  const auto n_paths = static_cast<std::size_t>(p.integer("n_paths", 10000, 2));
  const auto cfg = tilt_config(p, c);
  p.finish();
  Json rows = Json::array();
  std::vector<double> est, se;
  for (double t : ts) {
    steps_for(t, dt, Params::path("t_list"));
    const auto r = free_energy_estimate(cfg, t, dt, n_paths);
    rows.push_back(io::to_json(r));
    est.push_back(r.estimate.estimate);
    se.push_back(r.estimate.std_error);
  }
  // Reported for comparison only: the t -> infinity limit with bare Coulomb.
  const auto pk = solve_pekar(1.0);
  return Json{{"rows", rows}, {"estimates", est}, {"std_errors", se}, {"rho_tilde", pk.energy}};
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::string output_stem(const std::string& path) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = {"metric", "peel", "rate", "pekar", "fk-check",
                                                "khasminskii", "tilt", "tube", "free-energy"};
  return cmds;
}

bool is_stochastic(const std::string& command) {
  return command == "fk-check" || command == "khasminskii" || command == "tilt" || command == "tube" ||
         command == "free-energy";
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  for (const auto& item : j.items()) {
    const auto& k = item.key();
    if (k != "command" && k != "params" && k != "seed" && k != "output") throw ConfigError("/" + k, "unknown key");
  }
  ExperimentConfig c;
  if (!j.contains("command") || !j.at("command").is_string()) throw ConfigError("/command", "missing or not a string");
  c.command = j.at("command").get<std::string>();
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) {
    throw ConfigError("/command", "unknown command '" + c.command + "'");
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("/params", "must be an object");
    c.params = j.at("params");
  }
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      throw ConfigError("/seed", "must be a nonnegative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (is_stochastic(c.command) && !c.seed) throw ConfigError("/seed", "required for '" + c.command + "'");
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigError("/output", "must be a string");
    c.output = j.at("output").get<std::string>();
  }
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j{{"command", c.command}, {"params", c.params}};
  if (c.seed) j["seed"] = *c.seed;
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

RunResult run_experiment(const ExperimentConfig& c) {
  Params p(c.params);
  RunResult out;
  const auto& cmd = c.command;
  if (cmd == "metric") {
    out.result = run_metric(p);
  } else if (cmd == "peel") {
    out.result = run_peel(p);
  } else if (cmd == "rate") {
    out.result = run_rate(p);
  } else if (cmd == "pekar") {
    out.result = run_pekar(p, out);
  } else if (cmd == "fk-check") {
    out.result = run_fk(p, c);
  } else if (cmd == "khasminskii") {
    out.result = run_khasminskii(p, c);
  } else if (cmd == "tilt") {
    out.result = run_tilt(p, c);
  } else if (cmd == "tube") {
    out.result = run_tube(p, c, out);
  } else if (cmd == "free-energy") {
    out.result = run_free_energy(p, c);
  } else {
    throw ConfigError("/command", "unknown command '" + cmd + "'");
  }
  return out;
}

Json result_body(const ExperimentConfig& c, const RunResult& r) {
  return Json{{"config", config_to_json(c)}, {"result", r.result}};
}

int run(const ExperimentConfig& c, std::ostream& log) {
  const auto started = iso_now();
  RunResult r;
  try {
    r = run_experiment(c);
  } catch (const ConfigError& e) {
    log << "invalid config: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::NoConvergence ? kExitNumerical : kExitInvalid;
  }
  auto doc = result_body(c, r);
  doc["metadata"] = Json{{"started", started},
                         {"finished", iso_now()},
                         {"isa", std::string(kernels::to_string(kernels::active_isa()))},
                         {"hardware_threads", std::thread::hardware_concurrency()}};
  if (c.output.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::ofstream f(c.output);
    if (!f) {
      log << "cannot write " << c.output << '\n';
      return kExitInvalid;
    }
    f << doc.dump(2) << '\n';
    const auto stem = output_stem(c.output);
    for (const auto& t : r.tables) std::ofstream(stem + t.suffix) << t.body;
  }
  if (r.numerical_failure) {
    log << "numerical failure flagged in the result\n";
    return kExitNumerical;
  }
  return kExitOk;
}

namespace {

bool check_op(const std::string& op, const Json& a, const Json& b, double tol) {
  auto num = [](const Json& v) {
    if (!v.is_number()) throw ConfigError("", "operand is not a number");
    return v.get<double>();
  };
  if (op == "==") return a == b;
  if (op == "true") return a.is_boolean() && a.get<bool>();
  if (op == "false") return a.is_boolean() && !a.get<bool>();
  if (op == "decreasing" || op == "increasing") {
    if (!a.is_array() || a.size() < 2) return false;
    for (std::size_t i = 1; i < a.size(); ++i) {
      const double prev = num(a[i - 1]), cur = num(a[i]);
      if (op == "decreasing" ? !(cur < prev) : !(cur > prev)) return false;
    }
    return true;
  }
  const double x = num(a), y = num(b);
  if (op == "<=") return x <= y + tol;
  if (op == ">=") return x >= y - tol;
  if (op == "<") return x < y;
  if (op == ">") return x > y;
  if (op == "approx") return std::abs(x - y) <= tol;
  if (op == "rel") return std::abs(x - y) <= tol * std::abs(y);
  throw ConfigError("/op", "unknown op '" + op + "'");
}

}  // namespace

bool ReproduceReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.pass; });
}

ReproduceReport reproduce(const Json& manifest) {
  if (!manifest.is_object() || !manifest.contains("criteria") || !manifest.at("criteria").is_array()) {
    throw ConfigError("/criteria", "manifest needs a 'criteria' array");
  }
  ReproduceReport rep;
  const auto& list = manifest.at("criteria");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& crit = list[i];
    const std::string where = "/criteria/" + std::to_string(i);
    if (!crit.is_object() || !crit.contains("config")) throw ConfigError(where, "needs a 'config'");
    const std::string name = crit.value("name", "criterion " + std::to_string(i));
    const auto cfg = parse_config(crit.at("config"));
    Json body;
    try {
      body = result_body(cfg, run_experiment(cfg));
    } catch (const std::exception& e) {
      rep.checks.push_back({name, "", "run", Json(e.what()), Json(nullptr), false});
      rep.bodies.emplace_back();
      continue;
    }
    rep.bodies.push_back(body.dump());
    for (const auto& chk : crit.value("checks", Json::array())) {
      CheckOutcome o;
      o.criterion = name;
      o.path = chk.value("path", "");
      o.op = chk.value("op", "==");
      const double tol = chk.value("tol", 0.0);
      try {
        o.actual = body.at(Json::json_pointer(o.path));
        if (chk.contains("ref")) {
          o.expected = body.at(Json::json_pointer(chk.at("ref").get<std::string>()));
        } else if (chk.contains("value")) {
          o.expected = chk.at("value");
        }
        o.pass = check_op(o.op, o.actual, o.expected, tol);
      } catch (const std::exception& e) {
        o.actual = Json(std::string("error: ") + e.what());
        o.pass = false;
      }
      rep.checks.push_back(std::move(o));
    }
  }
  return rep;
}

int reproduce_file(const std::string& path, std::ostream& out) {
  Json manifest;
  try {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open manifest '" + path + "'");
    manifest = Json::parse(in);
  } catch (const Json::exception& e) {
    out << "invalid manifest: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ConfigError& e) {
    out << "invalid manifest: " << e.what() << '\n';
    return kExitInvalid;
  }
  ReproduceReport rep;
  try {
    rep = reproduce(manifest);
  } catch (const ConfigError& e) {
    out << "invalid manifest: " << e.what() << '\n';
    return kExitInvalid;
  }
  for (const auto& c : rep.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.criterion << "  " << c.path << ' ' << c.op << ' ' << c.expected.dump()
        << "  actual " << c.actual.dump() << '\n';
  }
  out << rep.checks.size() << " checks, "
      << std::count_if(rep.checks.begin(), rep.checks.end(), [](const CheckOutcome& c) { return !c.pass; })
      << " failed\n";
  return rep.all_pass() ? kExitOk : kExitCheckFailed;
}

ThreeGaussianMixture three_gaussian_mixture(double n, double h) {
  require(n > 0.0 && h > 0.0, ErrorCode::InvalidArgument, "three-Gaussian mixture needs n > 0 and h > 0");
  const double sd = std::max(1.0, n);
  const auto grid = GridSpec::covering(h, Coord{-7.0 * sd - 1.0}, Coord{n + 7.0 * sd + 1.0});
  const auto a = gaussian_measure(grid, Coord{0.0}, 1.0).measure;
  const auto b = gaussian_measure(grid, Coord{n}, 1.0).measure;
  const auto c = gaussian_measure(grid, Coord{0.0}, n * n).measure;
  const MixtureTerm terms[3] = {{1.0 / 3.0, a}, {1.0 / 3.0, b}, {1.0 / 3.0, c}};
  const auto alpha = gaussian_measure(GridSpec::covering(h, Coord{-8.0}, Coord{8.0}), Coord{0.0}, 1.0, 1.0 / 3.0);
  return {mixture(terms), Collection({alpha.measure, alpha.measure})};
}

}  // namespace occm
