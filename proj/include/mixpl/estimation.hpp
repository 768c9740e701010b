#pragma once

// Two-stage generalized-method-of-moments estimator for 2-PL-phi.
//
// Stage 1 makes a single pass over the data, estimating phi by structure
// frequencies and counting each selected moment event. Stage 2 minimises
//
//   sum_t ( Pr_kPL(E_t | params) - count_t / (n * phi_hat_t) )^2
//
// over the floored simplex product by multi-start Levenberg-Marquardt on a
// softmax reparameterisation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixpl/core.hpp"
#include "mixpl/profile_io.hpp"

namespace mixpl {

enum class Selector {
  Top2Way2,  // ranked top-2 plus one direction per 2-way pair
  Choice4,   // 17 choice-2,3,4 events per group of four
  Top3,      // ranked top-3 baseline (linear orders only)
};

std::string to_string(Selector selector);
Selector selector_from_string(const std::string& name);

enum class DataMode {
  Partial,  // orders carry their own structure; moments weighted by 1/phi_hat
  Linear,   // full rankings; each counts toward every event it extends
};

struct MomentEvent {
  PartialOrder event;
  StructureId structure;
  std::int64_t empirical_count = 0;
  double weight = 1.0;  // 1 / phi_hat of the structure (1 for linear data)
};

struct MomentSet {
  Selector selector = Selector::Top2Way2;
  std::vector<MomentEvent> events;

  int size() const { return static_cast<int>(events.size()); }
};

// m(m-1)-1 ranked top-2 events (the lexicographically last is dropped) then
// the pairs a_i > a_j, i < j.
MomentSet select_moments_top2_2way(int m);

// For each group (see choice_groups) the 17 choice events: three of the four
// choice-4 outcomes, two per choice-3 subset, one per pair. Events repeated
// by overlapping groups appear once.
MomentSet select_moments_choice4(int m);

// Every ranked top-3 event except the lexicographically last.
MomentSet select_moments_top3(int m);

MomentSet select_moments(Selector selector, int m);

// Structure counts divided by n; the support is the set of observed structures.
StructureDistribution estimate_phi(const Profile& profile);
StructureDistribution estimate_phi(OrderSource& source);

// Result of the single counting pass.
struct MomentData {
  int m = 0;
  DataMode mode = DataMode::Partial;
  std::int64_t n = 0;
  MomentSet moments;                  // only events with phi_hat > 0
  StructureDistribution phi_hat;      // empty for linear data
  int dropped_events = 0;
  std::vector<std::string> warnings;
};

// Reads every order exactly once. Throws EmptyProfileError on no data and
// NoMomentDataError when no selected event's structure was observed.
MomentData count_moments(OrderSource& source, MomentSet moments, DataMode mode);

// sum_t (mixture_prob(E_t) - count_t * weight_t / n)^2
double gmm_objective(const MixtureParams& candidate, const MomentSet& moments, std::int64_t n);

struct FitConfig {
  int k = 2;
  int starts = 10;
  double epsilon = 1e-6;
  double tolerance = 1e-10;  // stop once an accepted step improves less than this
  int max_iterations = 2000;
  std::uint64_t seed = 0;
  DataMode mode = DataMode::Partial;
  // k != 2 carries no identifiability guarantee; refused unless set.
  bool allow_unsupported_k = false;
};

struct StartResult {
  int index = 0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct FitReport {
  MixtureParams estimate;
  double objective = 0.0;
  int best_start = 0;
  std::vector<StartResult> starts;
  double runtime_ms = 0.0;
  double stage1_ms = 0.0;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  int moments_used = 0;
  bool guarantee_applies = true;
  std::optional<double> mse;
  std::vector<std::string> warnings;
};

// Stage 2 only.
FitReport fit_moments(const MomentData& data, const FitConfig& config);

// Both stages: one counting pass, then the multi-start minimisation.
FitReport fit(OrderSource& source, Selector selector, const FitConfig& config);
FitReport fit(const Profile& profile, Selector selector, const FitConfig& config);

// Squared error over (alpha, theta^(1..k)), minimised over component
// relabelings; phi is ignored.
double mse(const MixtureParams& estimate, const MixtureParams& truth);

}  // namespace mixpl
