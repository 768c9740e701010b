#pragma once

// JSON documents exchanged by the CLI.
//
// params:  {"m":int,"k":int,"alpha":[...],"components":[[...],...],"phi":{...}?}
// phi:     {"top-2":0.5,"way-2:1,2":0.1,"choice-3:1,2,3":0.4}

#include <json.hpp>

#include "mixpl/core.hpp"
#include "mixpl/estimation.hpp"
#include "mixpl/identifiability.hpp"

namespace mixpl {

using Json = nlohmann::ordered_json;

Json phi_to_json(const StructureDistribution& phi);
StructureDistribution phi_from_json(const Json& j);

Json params_to_json(const MixtureParams& params);
// Validates shape and simplex invariants.
MixtureParams params_from_json(const Json& j);

Json fit_report_to_json(const FitReport& report);
Json witness_to_json(const Witness& w, const WitnessReport& report);

}  // namespace mixpl
