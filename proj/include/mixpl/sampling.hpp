#pragma once

// Two-stage data generation: a linear order from k-PL, then projection onto a
// structure drawn from phi. Randomness always comes from an explicit engine.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "mixpl/core.hpp"

namespace mixpl {

using Rng = std::mt19937_64;

// Deterministic stream splitting (SplitMix64 finaliser over master ^ stream).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

// Sequential draw without replacement, proportional to theta.
LinearOrder sample_pl(const PLParams& theta, Rng& rng);

LinearOrder sample_linear(const MixtureParams& params, Rng& rng);

PartialOrder project(const LinearOrder& r, const StructureId& s);

// n i.i.d. partial orders from k-PL-phi. Requires params.phi.
Profile sample_profile(const MixtureParams& params, std::int64_t n, Rng& rng);

// n full rankings, stored as top-(m-1) orders.
Profile sample_linear_profile(const MixtureParams& params, std::int64_t n, Rng& rng);

// alpha and each theta^(r) drawn coordinate-wise uniform on (0,1), normalised.
MixtureParams random_truth(int m, int k, Rng& rng);

using Group = std::array<int, 4>;

// {a1,a2,a3,a4}, {a1,a5,a6,a7}, ...; when the alternatives run out the last
// group is {a1, a_{m-2}, a_{m-1}, a_m}. ceil((m-1)/3) groups.
std::vector<Group> choice_groups(int m);

// top-2 at 1/2, every 2-way pair at 1/(m(m-1)).
StructureDistribution setup_top2_2way(int m);

struct ChoiceSetup {
  StructureDistribution phi;
  std::vector<Group> groups;
};

// Per group: choice-4 : each choice-3 : each choice-2 weighted 4 : 3 : 1,
// renormalised within the group (weights sum to 22) and scaled by 1/C.
ChoiceSetup setup_choice234(int m);

}  // namespace mixpl
