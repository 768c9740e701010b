#include "mixpl/json_io.hpp"

#include "mixpl/errors.hpp"

namespace mixpl {
namespace {

Json vector_to_json(const Eigen::VectorXd& v) {
  Json array = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) array.push_back(v[i]);
  return array;
}

Eigen::VectorXd vector_from_json(const Json& j, const char* field) {
  if (!j.is_array()) throw InvariantError(std::string("'") + field + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvariantError(std::string("'") + field + "' must hold numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

Json phi_to_json(const StructureDistribution& phi) {
  Json j = Json::object();
  for (const auto& [s, p] : phi.entries()) j[structure_key(s)] = p;
  return j;
}

StructureDistribution phi_from_json(const Json& j) {
  if (!j.is_object()) throw InvariantError("phi must be an object of structure keys");
  StructureDistribution phi;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw InvariantError("phi entry '" + key + "' must be a number");
    const StructureId s = parse_structure_key(key);
    if (phi.contains(s)) throw InvariantError("phi lists structure '" + key + "' twice");
    phi.add(s, value.get<double>());
  }
  return phi;
}

Json params_to_json(const MixtureParams& params) {
  Json j;
  j["m"] = params.m();
  j["k"] = params.k();
  j["alpha"] = vector_to_json(params.alpha);
  Json components = Json::array();
  for (int r = 0; r < params.k(); ++r) components.push_back(vector_to_json(params.components.col(r)));
  j["components"] = components;
  if (params.phi) j["phi"] = phi_to_json(*params.phi);
  return j;
}

MixtureParams params_from_json(const Json& j) {
  if (!j.is_object()) throw InvariantError("params document must be an object");
  for (const char* field : {"m", "k", "alpha", "components"})
    if (!j.contains(field)) throw InvariantError(std::string("params document lacks '") + field + "'");
  const int m = j["m"].get<int>();
  const int k = j["k"].get<int>();
  MixtureParams params;
  params.alpha = vector_from_json(j["alpha"], "alpha");
  if (params.alpha.size() != k) throw DimensionError("'alpha' length differs from k");
  const Json& comps = j["components"];
  if (!comps.is_array() || static_cast<int>(comps.size()) != k) {
    throw DimensionError("'components' must list k parameter vectors");
  }
  params.components.resize(m, k);
  for (int r = 0; r < k; ++r) {
    const Eigen::VectorXd theta = vector_from_json(comps[r], "components");
    if (theta.size() != m) throw DimensionError("component length differs from m");
    params.components.col(r) = theta;
  }
  if (j.contains("phi")) params.phi = phi_from_json(j["phi"]);
  params.validate();
  return params;
}

Json fit_report_to_json(const FitReport& report) {
  Json j;
  j["estimate"] = params_to_json(report.estimate);
  j["objective"] = report.objective;
  j["best_start"] = report.best_start;
  Json starts = Json::array();
  for (const StartResult& s : report.starts) {
    starts.push_back(
        {{"start", s.index}, {"objective", s.objective}, {"iterations", s.iterations}, {"converged", s.converged}});
  }
  j["starts"] = starts;
  j["runtime_ms"] = report.runtime_ms;
  j["stage1_ms"] = report.stage1_ms;
  j["seed"] = report.seed;
  j["n"] = report.n;
  j["moments_used"] = report.moments_used;
  j["guarantee_applies"] = report.guarantee_applies;
  if (report.mse) j["mse"] = *report.mse;
  j["warnings"] = report.warnings;
  return j;
}

Json witness_to_json(const Witness& w, const WitnessReport& report) {
  Json j;
  j["k"] = w.k;
  j["m"] = w.m;
  j["l1"] = w.l1;
  j["l2"] = w.l2;
  j["e"] = vector_to_json(w.e);
  j["beta"] = vector_to_json(w.beta);
  j["mixture_a"] = params_to_json(w.mixture_a);
  j["mixture_b"] = params_to_json(w.mixture_b);
  j["max_discrepancy"] = report.max_discrepancy;
  j["max_choice_discrepancy"] = report.max_choice_discrepancy;
  j["outside_discrepancy"] = report.outside_discrepancy;
  j["orders_checked"] = report.orders_checked;
  j["passed"] = report.passed;
  return j;
}

}  // namespace mixpl
