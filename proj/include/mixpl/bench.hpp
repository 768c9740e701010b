#pragma once

// Synthetic MSE / runtime study: fresh ground truth per (setting, n, trial),
// sample, fit, score. Output is plot-ready CSV.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mixpl/estimation.hpp"

namespace mixpl {

enum class Setting {
  Top2Way2,         // partial orders, top-2 + 2-way phi, top2_2way moments
  Choice234,        // partial orders, choice-2,3,4 phi, choice4 moments
  LinearTop2Way2,   // full rankings, top2_2way moments
  LinearChoice234,  // full rankings, choice4 moments
  LinearTop3,       // full rankings, ranked top-3 baseline moments
};

std::string to_string(Setting setting);
Setting setting_from_string(const std::string& name);

struct BenchConfig {
  int m = 10;
  int k = 2;
  std::vector<Setting> settings{Setting::Top2Way2};
  std::vector<std::int64_t> n_grid{1000, 10000, 100000};
  int trials = 50;
  std::uint64_t seed = 1;
  int starts = 10;
  double epsilon = 1e-6;
  int threads = 0;  // 0 = hardware concurrency
};

struct TrialRow {
  Setting setting = Setting::Top2Way2;
  std::int64_t n = 0;
  int trial = 0;
  double mse = 0.0;
  double fit_runtime_ms = 0.0;
  double stage1_ms = 0.0;
  double objective = 0.0;
  std::uint64_t seed = 0;
  std::string error;  // non-empty when the trial failed
};

struct AggregateRow {
  Setting setting = Setting::Top2Way2;
  std::int64_t n = 0;
  int trials = 0;
  int failures = 0;
  double mean_mse = 0.0;
  double median_mse = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_runtime_ms = 0.0;
};

std::uint64_t trial_seed(std::uint64_t master, Setting setting, std::int64_t n, int trial);

// One full trial; never throws, failures land in TrialRow::error.
TrialRow run_trial(const BenchConfig& config, Setting setting, std::int64_t n, int trial);

// Rows ordered by (setting, n, trial) regardless of scheduling.
std::vector<TrialRow> run_experiment(const BenchConfig& config);

// mean +/- 1.96 * sd / sqrt(trials) over successful trials.
std::vector<AggregateRow> aggregate(const std::vector<TrialRow>& rows);

void write_trials_csv(std::ostream& out, const std::vector<TrialRow>& rows);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

}  // namespace mixpl
