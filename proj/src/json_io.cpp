#include "occm/json_io.hpp"

#include <cmath>
#include <sstream>

#include "occm/error.hpp"

namespace occm::io {

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const DiscreteMeasure& m) {
  const auto& g = m.grid();
  Json j;
  j["dim"] = g.dim();
  j["spacing"] = g.spacing();
  j["origin"] = g.origin();
  j["shape"] = g.shape();
  j["weights"] = std::vector<double>(m.weights().begin(), m.weights().end());
  j["mass"] = total_mass(m);
  return j;
}

DiscreteMeasure measure_from_json(const Json& j) {
  require(j.is_object(), ErrorCode::InvalidArgument, "a measure must be a JSON object");
  for (const char* key : {"dim", "spacing", "origin", "shape", "weights"}) {
    require(j.contains(key), ErrorCode::InvalidArgument, std::string("measure is missing '") + key + "'");
  }
  const int dim = j.at("dim").get<int>();
  const auto origin = j.at("origin").get<Coord>();
  const auto shape = j.at("shape").get<std::vector<Index>>();
  require(static_cast<int>(origin.size()) == dim && static_cast<int>(shape.size()) == dim,
          ErrorCode::DimensionMismatch, "origin/shape length differs from dim");
  auto grid = GridSpec::from_origin(j.at("spacing").get<double>(), origin, shape);
  return DiscreteMeasure(std::move(grid), j.at("weights").get<std::vector<double>>());
}

Json to_json(const Collection& xi) {
  Json comps = Json::array();
  for (const auto& c : xi.components()) comps.push_back(to_json(c));
  return Json{{"components", comps}};
}

Collection collection_from_json(const Json& j) {
  const Json* list = &j;
  if (j.is_object()) {
    if (!j.contains("components")) return Collection({measure_from_json(j)});
    list = &j.at("components");
  }
  require(list->is_array(), ErrorCode::InvalidArgument, "components must be an array");
  std::vector<DiscreteMeasure> comps;
  for (const auto& c : *list) comps.push_back(measure_from_json(c));
  return Collection(std::move(comps));
}

Json to_json(const TestFunctionSpec& f) {
  return Json{{"r", f.r}, {"k", f.k}, {"offsets", f.offsets}, {"scales", f.scales}};
}

Json to_json(const MetricResult& r) {
  return Json{{"value", r.value}, {"error_bound", r.error_bound}, {"r_max", r.r_max}};
}

Json to_json(const RateReport& r) {
  return Json{{"value", finite_or_null(r.value)}, {"infinite", r.infinite}, {"method", r.method},
              {"h", r.h}, {"slack", r.slack}};
}

Json to_json(const PekarResult& r) {
  return Json{{"mass", r.mass},
              {"energy", r.energy},
              {"coulomb_term", r.coulomb_term},
              {"kinetic_term", r.kinetic_term},
              {"virial_ratio", r.virial_ratio()},
              {"iterations", r.iterations},
              {"residual", r.residual},
              {"converged", r.converged},
              {"decay_ok", r.decay_ok},
              {"r_grid", r.profile.r},
              {"psi", r.profile.psi}};
}

Json to_json(const McReport& r) {
  return Json{{"estimate", finite_or_null(r.estimate)},
              {"std_error", finite_or_null(r.std_error)},
              {"n_samples", r.n_samples},
              {"seed", r.seed}};
}

Json to_json(const KhasminskiiReport& r) {
  return Json{{"eta", to_json(r.eta)},
              {"moment", to_json(r.moment)},
              {"first_moment0", to_json(r.first_moment0)},
              {"anchor", 4.0 * inverse_three_halves_moment()},
              {"eta_by_start", r.eta_by_start},
              {"bound", finite_or_null(r.bound)},
              {"eta_too_large", r.eta_too_large},
              {"holds", r.holds}};
}

Json to_json(const FkReport& r) {
  return Json{{"estimate", to_json(r.estimate)}, {"identity", to_json(r.identity)},
              {"bound", r.bound}, {"holds", r.holds}};
}

Json to_json(const FreeEnergyReport& r) {
  return Json{{"estimate", to_json(r.estimate)}, {"t", r.t}, {"diagonal", r.diagonal},
              {"mean_y_bound", r.mean_y_bound}};
}

Json to_json(const TubeRow& r) {
  return Json{{"t", r.t},           {"median", r.median}, {"q25", r.q25},
              {"q75", r.q75},       {"mean", r.mean},     {"mean_energy", r.mean_energy},
              {"acceptance", r.acceptance}, {"distances", r.distances}};
}

Json to_json(const DualResult& r) {
  return Json{{"value", r.value}, {"best", r.best}, {"rate", r.rate}, {"slack", r.slack}};
}

Json to_json(const ImsReport& r) {
  return Json{{"sum_local", r.sum_local}, {"total", r.total}, {"excess", r.excess},
              {"fitted_c", r.fitted_c}, {"gradient_term", r.gradient_term}};
}

Json to_json(const SubadditivityReport& r) {
  return Json{{"mixture_rate", r.mixture_rate}, {"component_rates", r.component_rates},
              {"filler_rate", r.filler_rate},   {"bound", r.bound},
              {"slack", r.slack},               {"holds", r.holds}};
}

Json peel_report(const Decomposition& dec, double probe_radius) {
  Json comps = Json::array();
  for (const auto& c : dec.components) {
    comps.push_back(Json{{"mass", c.mass},
                         {"center", c.center},
                         {"radius_used", c.radius_used},
                         {"warning", c.no_gap_found ? Json("no_gap_found") : Json(nullptr)}});
  }
  Json scores;
  scores["dust_concentration"] = concentration_function(dec.dust, probe_radius);
  scores["probe_radius"] = probe_radius;
  scores["any_warning"] = dec.any_warning();
  return Json{{"components", comps},
              {"dust_mass", total_mass(dec.dust)},
              {"separation_matrix", dec.separation},
              {"scores", scores}};
}

std::string profile_csv(const RadialProfile& p) {
  std::ostringstream out;
  out.precision(17);
  out << "r,psi\n";
  for (std::size_t i = 0; i < p.size(); ++i) out << p.r[i] << ',' << p.psi[i] << '\n';
  return out.str();
}

std::string tube_csv(const std::vector<TubeRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "t,median,q25,q75,mean,mean_energy,acceptance\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.median << ',' << r.q25 << ',' << r.q75 << ',' << r.mean << ',' << r.mean_energy << ','
        << r.acceptance << '\n';
  }
  return out.str();
}

}  // namespace occm::io
