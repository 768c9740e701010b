#pragma once

// Test-side reference implementations. Nothing here calls into the library's
// probability code: every marginal is a sum of full-ranking probabilities
// computed straight from the sequential-choice definition.

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "mixpl/core.hpp"

namespace oracle {

inline double ranking_prob(const Eigen::VectorXd& theta, const std::vector<int>& ranking) {
  double remaining = theta.sum();
  double p = 1.0;
  for (int a : ranking) {
    p *= theta[a] / remaining;
    remaining -= theta[a];
  }
  return p;
}

inline bool consistent(const std::vector<int>& ranking, const mixpl::PartialOrder& o) {
  std::vector<int> pos(ranking.size());
  for (std::size_t i = 0; i < ranking.size(); ++i) pos[ranking[i]] = static_cast<int>(i);
  const auto items = o.items();
  switch (o.kind()) {
    case mixpl::StructureKind::Top:
      for (std::size_t i = 0; i < items.size(); ++i)
        if (ranking[i] != items[i]) return false;
      return true;
    case mixpl::StructureKind::Way:
      for (std::size_t i = 1; i < items.size(); ++i)
        if (pos[items[i - 1]] > pos[items[i]]) return false;
      return true;
    case mixpl::StructureKind::Choice:
      for (int a : items)
        if (pos[a] < pos[o.chosen()]) return false;
      return true;
  }
  return false;
}

inline double marginal(const Eigen::VectorXd& theta, const mixpl::PartialOrder& o) {
  std::vector<int> ranking(theta.size());
  std::iota(ranking.begin(), ranking.end(), 0);
  double total = 0.0;
  do {
    if (consistent(ranking, o)) total += ranking_prob(theta, ranking);
  } while (std::next_permutation(ranking.begin(), ranking.end()));
  return total;
}

inline double mixture_marginal(const mixpl::MixtureParams& p, const mixpl::PartialOrder& o) {
  double total = 0.0;
  for (int r = 0; r < p.k(); ++r) total += p.alpha[r] * marginal(p.components.col(r), o);
  return total;
}

inline Eigen::VectorXd random_simplex(int m, std::mt19937_64& rng, double floor = 0.0) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i) v[i] = u(rng);
  return v / v.sum();
}

inline mixpl::MixtureParams random_mixture(int m, int k, std::mt19937_64& rng) {
  mixpl::MixtureParams p;
  p.alpha = random_simplex(k, rng, 0.05);
  p.components.resize(m, k);
  for (int r = 0; r < k; ++r) p.components.col(r) = random_simplex(m, rng, 0.05);
  return p;
}

// Every structure over m alternatives (top-1..m-1, every l-way and choice-l subset).
inline std::vector<mixpl::StructureId> all_structures(int m) {
  std::vector<mixpl::StructureId> out;
  for (int l = 1; l <= m - 1; ++l) out.push_back(mixpl::StructureId::top(l));
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> subset;
    for (int a = 0; a < m; ++a)
      if (mask & (1u << a)) subset.push_back(a);
    out.push_back(mixpl::StructureId::way(subset));
    out.push_back(mixpl::StructureId::choice(subset));
  }
  return out;
}

}  // namespace oracle
