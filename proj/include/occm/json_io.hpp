#pragma once

// JSON views of measures and reports, plus CSV for vector data. Doubles are
// written in shortest round-trip form, so reading a measure back restores
// every weight exactly.

#include <string>

#include "json.hpp"
#include "occm/decompose.hpp"
#include "occm/grid_measure.hpp"
#include "occm/pekar.hpp"
#include "occm/rate.hpp"
#include "occm/sampler.hpp"
#include "occm/test_family.hpp"

namespace occm::io {

using Json = nlohmann::json;

/// {dim, spacing, origin, shape, weights (flat row-major), mass}
Json to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const Json& j);

/// {components: [measure, ...]}; a bare measure object or a bare array are
/// accepted on input as well.
Json to_json(const Collection& xi);
Collection collection_from_json(const Json& j);

Json to_json(const TestFunctionSpec& f);
Json to_json(const MetricResult& r);
/// value is null when the rate is infinite.
Json to_json(const RateReport& r);
Json to_json(const PekarResult& r);
Json to_json(const McReport& r);
Json to_json(const KhasminskiiReport& r);
Json to_json(const FkReport& r);
Json to_json(const FreeEnergyReport& r);
Json to_json(const TubeRow& r);
Json to_json(const DualResult& r);
Json to_json(const ImsReport& r);
Json to_json(const SubadditivityReport& r);

/// {components: [{mass, center, radius_used, warning}], dust_mass, separation_matrix, scores}
Json peel_report(const Decomposition& dec, double probe_radius);

/// "r,psi" rows.
std::string profile_csv(const RadialProfile& p);

/// "t,median,q25,q75,mean,mean_energy,acceptance" rows.
std::string tube_csv(const std::vector<TubeRow>& rows);

}  // namespace occm::io
