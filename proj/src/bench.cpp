#include "mixpl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <map>
#include <thread>

#include "mixpl/errors.hpp"
#include "mixpl/sampling.hpp"

namespace mixpl {
namespace {

bool is_linear(Setting s) {
  return s == Setting::LinearTop2Way2 || s == Setting::LinearChoice234 || s == Setting::LinearTop3;
}

Selector selector_for(Setting s) {
  switch (s) {
    case Setting::Top2Way2:
    case Setting::LinearTop2Way2:
      return Selector::Top2Way2;
    case Setting::Choice234:
    case Setting::LinearChoice234:
      return Selector::Choice4;
    case Setting::LinearTop3:
      return Selector::Top3;
  }
  return Selector::Top2Way2;
}

}  // namespace

std::string to_string(Setting setting) {
  switch (setting) {
    case Setting::Top2Way2:
      return "top2_2way";
    case Setting::Choice234:
      return "choice234";
    case Setting::LinearTop2Way2:
      return "linear_top2_2way";
    case Setting::LinearChoice234:
      return "linear_choice234";
    case Setting::LinearTop3:
      return "linear_top3";
  }
  return "?";
}

Setting setting_from_string(const std::string& name) {
  for (Setting s : {Setting::Top2Way2, Setting::Choice234, Setting::LinearTop2Way2,
                    Setting::LinearChoice234, Setting::LinearTop3}) {
    if (to_string(s) == name) return s;
  }
  throw PreconditionError("unknown bench setting '" + name + "'");
}

std::uint64_t trial_seed(std::uint64_t master, Setting setting, std::int64_t n, int trial) {
  std::uint64_t seed = split_seed(master, static_cast<std::uint64_t>(setting));
  seed = split_seed(seed, static_cast<std::uint64_t>(n));
  return split_seed(seed, static_cast<std::uint64_t>(trial));
}

TrialRow run_trial(const BenchConfig& config, Setting setting, std::int64_t n, int trial) {
  TrialRow row;
  row.setting = setting;
  row.n = n;
  row.trial = trial;
  row.seed = trial_seed(config.seed, setting, n, trial);
  try {
    Rng rng(row.seed);
    MixtureParams truth = random_truth(config.m, config.k, rng);
    Profile profile;
    if (is_linear(setting)) {
      profile = sample_linear_profile(truth, n, rng);
    } else {
      truth.phi = setting == Setting::Top2Way2 ? setup_top2_2way(config.m)
                                               : setup_choice234(config.m).phi;
      profile = sample_profile(truth, n, rng);
    }
    FitConfig fit_config;
    fit_config.k = config.k;
    fit_config.starts = config.starts;
    fit_config.epsilon = config.epsilon;
    fit_config.seed = split_seed(row.seed, 0xf17ULL);
    fit_config.mode = is_linear(setting) ? DataMode::Linear : DataMode::Partial;
    fit_config.allow_unsupported_k = config.k != 2;
    const FitReport report = fit(profile, selector_for(setting), fit_config);
    row.mse = mse(report.estimate, truth);
    row.objective = report.objective;
    row.fit_runtime_ms = report.runtime_ms;
    row.stage1_ms = report.stage1_ms;
  } catch (const std::exception& e) {
    row.error = e.what();
    row.mse = std::nan("");
    row.objective = std::nan("");
  }
  return row;
}

std::vector<TrialRow> run_experiment(const BenchConfig& config) {
  if (config.m < 4) throw DimensionError("bench needs m >= 4");
  if (config.trials < 1) throw PreconditionError("bench needs trials >= 1");

  struct Task {
    Setting setting;
    std::int64_t n;
    int trial;
  };
  std::vector<Task> tasks;
  for (Setting s : config.settings)
    for (std::int64_t n : config.n_grid)
      for (int t = 0; t < config.trials; ++t) tasks.push_back({s, n, t});

  std::vector<TrialRow> rows(tasks.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t i = cursor++; i < tasks.size(); i = cursor++) {
      rows[i] = run_trial(config, tasks[i].setting, tasks[i].n, tasks[i].trial);
    }
  };
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRow>& rows) {
  std::map<std::pair<Setting, std::int64_t>, std::vector<const TrialRow*>> groups;
  for (const TrialRow& row : rows) groups[{row.setting, row.n}].push_back(&row);

  std::vector<AggregateRow> out;
  for (const auto& [key, members] : groups) {
    AggregateRow agg;
    agg.setting = key.first;
    agg.n = key.second;
    std::vector<double> errors;
    double runtime = 0.0;
    for (const TrialRow* row : members) {
      if (!row->error.empty()) {
        ++agg.failures;
        continue;
      }
      errors.push_back(row->mse);
      runtime += row->fit_runtime_ms;
    }
    agg.trials = static_cast<int>(errors.size());
    if (!errors.empty()) {
      const double count = static_cast<double>(errors.size());
      double mean = 0.0;
      for (double e : errors) mean += e;
      mean /= count;
      double var = 0.0;
      for (double e : errors) var += (e - mean) * (e - mean);
      const double sd = errors.size() > 1 ? std::sqrt(var / (count - 1.0)) : 0.0;
      const double half = 1.96 * sd / std::sqrt(count);
      agg.mean_mse = mean;
      agg.ci_low = mean - half;
      agg.ci_high = mean + half;
      agg.mean_runtime_ms = runtime / count;
      std::vector<double> sorted = errors;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t mid = sorted.size() / 2;
      agg.median_mse = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    } else {
      agg.mean_mse = agg.median_mse = agg.ci_low = agg.ci_high = std::nan("");
    }
    out.push_back(agg);
  }
  return out;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRow>& rows) {
  out << "setting,n,trial,mse,fit_runtime_ms,objective,seed\n";
  out << std::setprecision(17);
  for (const TrialRow& r : rows) {
    out << to_string(r.setting) << ',' << r.n << ',' << r.trial << ',' << r.mse << ','
        << r.fit_runtime_ms << ',' << r.objective << ',' << r.seed << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "setting,n,mean_mse,ci_low,ci_high,mean_runtime_ms\n";
  out << std::setprecision(17);
  for (const AggregateRow& r : rows) {
    out << to_string(r.setting) << ',' << r.n << ',' << r.mean_mse << ',' << r.ci_low << ','
        << r.ci_high << ',' << r.mean_runtime_ms << '\n';
  }
}

}  // namespace mixpl
