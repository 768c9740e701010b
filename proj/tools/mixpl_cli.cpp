#include <CLI11.hpp>
#include <json.hpp>

#include <cxxabi.h>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <typeinfo>
#include <vector>

#include "mixpl/bench.hpp"
#include "mixpl/errors.hpp"
#include "mixpl/estimation.hpp"
#include "mixpl/identifiability.hpp"
#include "mixpl/json_io.hpp"
#include "mixpl/probability.hpp"
#include "mixpl/profile_io.hpp"
#include "mixpl/sampling.hpp"

namespace {

using mixpl::Json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::string error_name(const std::exception& e) {
  const char* mangled = typeid(e).name();
  int status = 0;
  std::unique_ptr<char, void (*)(void*)> demangled(abi::__cxa_demangle(mangled, nullptr, nullptr, &status),
                                                    std::free);
  std::string name = status == 0 && demangled ? demangled.get() : mangled;
  if (auto pos = name.rfind("::"); pos != std::string::npos) name = name.substr(pos + 2);
  return name;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mixpl::InvariantError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw mixpl::InvariantError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw mixpl::InvariantError("cannot write '" + path + "'");
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---- sample ----------------------------------------------------------------

struct SampleArgs {
  int m = 0;
  int k = 2;
  std::string setting;
  std::string phi_file;
  std::string params_file;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::string truth_out;
  std::string out;
};

int run_sample(const SampleArgs& a) {
  mixpl::Rng rng(a.seed);
  mixpl::MixtureParams truth;
  if (!a.params_file.empty()) {
    truth = mixpl::params_from_json(read_json_file(a.params_file));
    if (a.m != 0 && truth.m() != a.m) throw mixpl::DimensionError("--m disagrees with the params file");
  } else {
    if (a.m < 2) throw mixpl::DimensionError("--m must be at least 2");
    truth = mixpl::random_truth(a.m, a.k, rng);
  }
  const int m = truth.m();

  bool linear = false;
  if (!a.phi_file.empty()) {
    truth.phi = mixpl::phi_from_json(read_json_file(a.phi_file));
  } else if (a.setting == "top2_2way") {
    truth.phi = mixpl::setup_top2_2way(m);
  } else if (a.setting == "choice234") {
    truth.phi = mixpl::setup_choice234(m).phi;
  } else if (a.setting == "linear") {
    linear = true;
  } else if (!truth.phi) {
    throw mixpl::PreconditionError("give --setting or --phi-file");
  }
  if (truth.phi) mixpl::validate_structure_set(*truth.phi, m).throw_if_invalid();

  const mixpl::Profile profile =
      linear ? mixpl::sample_linear_profile(truth, a.n, rng) : mixpl::sample_profile(truth, a.n, rng);

  std::ostringstream text;
  mixpl::write_profile(text, profile);
  emit(a.out, text.str());
  if (!a.truth_out.empty()) emit(a.truth_out, dump(mixpl::params_to_json(truth)));
  std::cerr << "sampled " << profile.orders.size() << " orders over m=" << m << "\n";
  return 0;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
  std::string in;
  std::string selector = "top2_2way";
  int k = 2;
  int starts = 10;
  double epsilon = 1e-6;
  std::uint64_t seed = 0;
  std::string truth;
  std::string report_out;
  bool linear = false;
  bool allow_k = false;
};

int run_fit(const FitArgs& a) {
  mixpl::FitConfig config;
  config.k = a.k;
  config.starts = a.starts;
  config.epsilon = a.epsilon;
  config.seed = a.seed;
  config.mode = a.linear ? mixpl::DataMode::Linear : mixpl::DataMode::Partial;
  config.allow_unsupported_k = a.allow_k;
  const mixpl::Selector selector = mixpl::selector_from_string(a.selector);

  std::ifstream file;
  if (a.in != "-") {
    file.open(a.in);
    if (!file) throw mixpl::InvariantError("cannot open '" + a.in + "'");
  }
  std::istream& in = a.in == "-" ? std::cin : file;
  mixpl::JsonLinesSource source(in);
  mixpl::FitReport report = mixpl::fit(source, selector, config);

  if (!a.truth.empty()) {
    const mixpl::MixtureParams truth = mixpl::params_from_json(read_json_file(a.truth));
    report.mse = mixpl::mse(report.estimate, truth);
  }
  emit(a.report_out, dump(mixpl::fit_report_to_json(report)));
  std::cerr << "fit n=" << report.n << " moments=" << report.moments_used << " objective=" << report.objective
            << " best_start=" << report.best_start << " runtime_ms=" << report.runtime_ms;
  if (report.mse) std::cerr << " mse=" << *report.mse;
  std::cerr << "\n";
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

// ---- prob ------------------------------------------------------------------

int run_prob(const std::string& params_file, const std::string& order_line, const std::string& out) {
  const mixpl::MixtureParams params = mixpl::params_from_json(read_json_file(params_file));
  const mixpl::PartialOrder order = mixpl::parse_order_line(order_line, params.m(), 1);
  Json j;
  j["order"] = Json::parse(mixpl::format_order_line(order, params.m()));
  j["mixture_probability"] = mixpl::mixture_partial_prob(params, order);
  if (params.phi) j["model_probability"] = mixpl::model_partial_prob(params, order);
  emit(out, dump(j));
  return 0;
}

// ---- witness ---------------------------------------------------------------

int run_witness(int k, int m, int l1, int l2, const std::vector<double>& e, const std::string& out) {
  std::optional<Eigen::VectorXd> values;
  if (!e.empty()) values = Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
  const mixpl::Witness w = mixpl::build_witness(k, m, l1, l2, values);
  const mixpl::WitnessReport report = mixpl::verify_witness(w);
  emit(out, dump(mixpl::witness_to_json(w, report)));
  std::cerr << "witness max_discrepancy=" << report.max_discrepancy
            << " outside_discrepancy=" << report.outside_discrepancy << (report.passed ? " passed" : " FAILED")
            << "\n";
  return report.passed ? 0 : kExitData;
}

// ---- bench -----------------------------------------------------------------

// {"m":10,"k":2,"settings":["top2_2way"],"n_grid":[1000],"trials":50,"seed":1,
//  "starts":10,"epsilon":1e-6,"threads":0,"trials_csv":"...","aggregate_csv":"..."}
int run_bench(const std::string& config_file, const std::string& out) {
  const Json j = read_json_file(config_file);
  if (!j.is_object()) throw mixpl::InvariantError("bench config must be an object");
  mixpl::BenchConfig config;
  config.m = j.value("m", config.m);
  config.k = j.value("k", config.k);
  config.trials = j.value("trials", config.trials);
  config.seed = j.value("seed", config.seed);
  config.starts = j.value("starts", config.starts);
  config.epsilon = j.value("epsilon", config.epsilon);
  config.threads = j.value("threads", config.threads);
  if (j.contains("settings")) {
    config.settings.clear();
    for (const auto& s : j["settings"]) config.settings.push_back(mixpl::setting_from_string(s.get<std::string>()));
  }
  if (j.contains("n_grid")) config.n_grid = j["n_grid"].get<std::vector<std::int64_t>>();

  const std::vector<mixpl::TrialRow> rows = mixpl::run_experiment(config);
  const std::vector<mixpl::AggregateRow> summary = mixpl::aggregate(rows);

  if (j.contains("trials_csv")) {
    std::ostringstream text;
    mixpl::write_trials_csv(text, rows);
    emit(j["trials_csv"].get<std::string>(), text.str());
  }
  if (j.contains("aggregate_csv")) {
    std::ostringstream text;
    mixpl::write_aggregate_csv(text, summary);
    emit(j["aggregate_csv"].get<std::string>(), text.str());
  }

  Json result = Json::array();
  for (const mixpl::AggregateRow& r : summary) {
    result.push_back({{"setting", mixpl::to_string(r.setting)},
                      {"n", r.n},
                      {"trials", r.trials},
                      {"failures", r.failures},
                      {"mean_mse", r.mean_mse},
                      {"median_mse", r.median_mse},
                      {"ci_low", r.ci_low},
                      {"ci_high", r.ci_high},
                      {"mean_runtime_ms", r.mean_runtime_ms}});
    std::cerr << mixpl::to_string(r.setting) << " n=" << r.n << " mean_mse=" << r.mean_mse
              << " failures=" << r.failures << "\n";
  }
  emit(out, dump(result));
  return 0;
}

// ---- validate --------------------------------------------------------------

int run_validate(const std::string& phi_file, int m, const std::string& out) {
  const mixpl::StructureDistribution phi = mixpl::phi_from_json(read_json_file(phi_file));
  const mixpl::StructureValidation v = mixpl::validate_structure_set(phi, m);
  Json j;
  j["ok"] = v.ok();
  Json violations = Json::array();
  for (const auto& violation : v.violations) violations.push_back(violation.message);
  j["violations"] = violations;
  emit(out, dump(j));
  v.throw_if_invalid();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixtures of Plackett-Luce models over structured partial orders"};
  app.require_subcommand(1);

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw a profile of partial orders");
  sample_cmd->add_option("--m", sample.m, "Number of alternatives");
  sample_cmd->add_option("--k", sample.k, "Number of mixture components")->check(CLI::PositiveNumber);
  auto* setting_opt = sample_cmd->add_option("--setting", sample.setting, "Structure setup")
                          ->check(CLI::IsMember({"top2_2way", "choice234", "linear"}));
  auto* phi_opt = sample_cmd->add_option("--phi-file", sample.phi_file, "Structure distribution JSON");
  setting_opt->excludes(phi_opt);
  sample_cmd->add_option("--params-file", sample.params_file, "Use these parameters instead of a random truth");
  sample_cmd->add_option("--n", sample.n, "Number of orders")->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sample.seed, "Random seed");
  sample_cmd->add_option("--truth-out", sample.truth_out, "Write ground-truth parameters here");
  sample_cmd->add_option("--out", sample.out, "Profile output path (default stdout)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate a 2-component mixture by the method of moments");
  fit_cmd->add_option("--in", fit.in, "Profile path, or - for stdin")->required();
  fit_cmd->add_option("--selector", fit.selector, "Moment selector")
      ->check(CLI::IsMember({"top2_2way", "choice4", "top3"}));
  fit_cmd->add_option("--k", fit.k, "Number of components")->check(CLI::PositiveNumber);
  fit_cmd->add_flag("--allow-unsupported-k", fit.allow_k, "Permit k != 2");
  fit_cmd->add_option("--starts", fit.starts, "Optimizer restarts")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--epsilon", fit.epsilon, "Parameter floor");
  fit_cmd->add_option("--seed", fit.seed, "Seed for the restart draws");
  fit_cmd->add_option("--truth", fit.truth, "Ground-truth params for an MSE column");
  fit_cmd->add_option("--report-out", fit.report_out, "Report path (default stdout)");
  fit_cmd->add_flag("--linear", fit.linear, "Treat every order as a full ranking");

  std::string params_file, order_line, prob_out;
  auto* prob_cmd = app.add_subcommand("prob", "Probability of one partial order");
  prob_cmd->add_option("--params-file", params_file, "Mixture parameters JSON")->required();
  prob_cmd->add_option("--order", order_line, "Order as a profile line")->required();
  prob_cmd->add_option("--out", prob_out, "Output path");

  int wk = 0, wm = 0, wl1 = 0, wl2 = 0;
  std::vector<double> we;
  std::string witness_out;
  auto* witness_cmd = app.add_subcommand("witness", "Build and verify a non-identifiability witness");
  witness_cmd->add_option("--k", wk)->required();
  witness_cmd->add_option("--m", wm)->required();
  witness_cmd->add_option("--l1", wl1)->required();
  witness_cmd->add_option("--l2", wl2)->required();
  witness_cmd->add_option("--e", we, "2k ascending values in (0,1)");
  witness_cmd->add_option("--out", witness_out, "Output path");

  std::string bench_config, bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Synthetic MSE and runtime study");
  bench_cmd->add_option("--config-file", bench_config, "Bench config JSON")->required();
  bench_cmd->add_option("--out", bench_out, "Output path");

  std::string validate_phi, validate_out;
  int validate_m = 0;
  auto* validate_cmd = app.add_subcommand("validate", "Check a structure distribution");
  validate_cmd->add_option("--phi-file", validate_phi)->required();
  validate_cmd->add_option("--m", validate_m)->required();
  validate_cmd->add_option("--out", validate_out, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sample_cmd) return run_sample(sample);
    if (*fit_cmd) return run_fit(fit);
    if (*prob_cmd) return run_prob(params_file, order_line, prob_out);
    if (*witness_cmd) return run_witness(wk, wm, wl1, wl2, we, witness_out);
    if (*bench_cmd) return run_bench(bench_config, bench_out);
    if (*validate_cmd) return run_validate(validate_phi, validate_m, validate_out);
  } catch (const mixpl::Error& e) {
    std::cerr << "error: " << error_name(e) << ": " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON document: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
