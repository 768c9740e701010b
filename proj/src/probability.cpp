#include "mixpl/probability.hpp"

#include <algorithm>
#include <numeric>

namespace mixpl {
namespace {

// Enumerates ordered l-tuples of distinct elements drawn from `pool`.
void ordered_tuples(const std::vector<int>& pool, int l, std::vector<int>& current,
                    std::vector<char>& used, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == l) {
    out.push_back(current);
    return;
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    current.push_back(pool[i]);
    ordered_tuples(pool, l, current, used, out);
    current.pop_back();
    used[i] = 0;
  }
}

}  // namespace

double pl_partial_prob_with_gradient(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                     const PartialOrder& o, Eigen::Ref<Eigen::VectorXd> gradient) {
  const auto items = o.items();
  const int l = o.size();
  gradient.setZero();

  if (o.kind() == StructureKind::Choice) {
    double mass = 0.0;
    for (int a : items) mass += theta[a];
    const double prob = theta[o.chosen()] / mass;
    for (int a : items) gradient[a] = -prob / mass;
    gradient[o.chosen()] += 1.0 / mass;
    return prob;
  }

  // d log p / d theta_j = [j ranked at s] / theta_j - sum_{p <= s} 1 / D_p, where
  // j counts as still available at every step for unranked alternatives.
  const bool top = o.kind() == StructureKind::Top;
  const int steps = top ? l : l - 1;
  const double tail = top ? detail::unranked_mass(theta, items) : 0.0;
  std::vector<double> denom(l);
  double acc = tail;
  for (int p = l - 1; p >= 0; --p) {
    acc += theta[items[p]];
    denom[p] = acc;
  }
  double prob = 1.0;
  for (int p = 0; p < steps; ++p) prob *= theta[items[p]] / denom[p];

  double harmonic = 0.0;
  for (int p = 0; p < l; ++p) {
    if (p < steps) harmonic += 1.0 / denom[p];
    const double self = p < steps ? 1.0 / theta[items[p]] : 0.0;
    gradient[items[p]] = prob * (self - harmonic);
  }
  if (top) {
    std::vector<char> ranked(theta.size(), 0);
    for (int a : items) ranked[a] = 1;
    for (Eigen::Index j = 0; j < theta.size(); ++j)
      if (!ranked[j]) gradient[j] = -prob * harmonic;
  }
  return prob;
}

double mixture_partial_prob(const MixtureParams& params, const PartialOrder& o) {
  if (params.components.cols() != params.k()) {
    throw DimensionError("mixture has mismatched alpha and component counts");
  }
  double total = 0.0;
  for (int r = 0; r < params.k(); ++r) {
    total += params.alpha[r] * pl_partial_prob(params.components.col(r), o);
  }
  return total;
}

double model_partial_prob(const MixtureParams& params, const PartialOrder& o) {
  if (!params.phi) throw UnknownStructureError("model has no structure distribution");
  const StructureId s = o.structure();
  if (!params.phi->contains(s)) {
    throw UnknownStructureError("structure " + structure_key(s) + " is not in phi");
  }
  return params.phi->probability(s) * mixture_partial_prob(params, o);
}

bool extends(const LinearOrder& r, const PartialOrder& o) {
  const auto items = o.items();
  switch (o.kind()) {
    case StructureKind::Top:
      for (int p = 0; p < o.size(); ++p)
        if (r[p] != items[p]) return false;
      return true;
    case StructureKind::Way: {
      const std::vector<int> pos = r.positions();
      for (int p = 1; p < o.size(); ++p)
        if (pos[items[p - 1]] > pos[items[p]]) return false;
      return true;
    }
    case StructureKind::Choice: {
      const std::vector<int> pos = r.positions();
      for (int a : items)
        if (pos[a] < pos[o.chosen()]) return false;
      return true;
    }
  }
  return false;
}

std::vector<LinearOrder> all_linear_orders(int m) {
  if (m > kMaxEnumerationSize) {
    throw TooLargeError("enumeration over " + std::to_string(m) + "! orders refused (m > " +
                        std::to_string(kMaxEnumerationSize) + ")");
  }
  std::vector<int> ranking(m);
  std::iota(ranking.begin(), ranking.end(), 0);
  std::vector<LinearOrder> out;
  do {
    out.emplace_back(ranking);
  } while (std::next_permutation(ranking.begin(), ranking.end()));
  return out;
}

double brute_force_partial_prob(const PLParams& theta, const PartialOrder& o) {
  const int m = static_cast<int>(theta.size());
  if (m > kMaxEnumerationSize) {
    throw TooLargeError("brute force needs m <= " + std::to_string(kMaxEnumerationSize));
  }
  o.validate(m);
  double total = 0.0;
  for (const LinearOrder& r : all_linear_orders(m)) {
    if (extends(r, o)) total += pl_linear_prob(theta, r);
  }
  return total;
}

std::vector<PartialOrder> orders_with_structure(const StructureId& s, int m) {
  s.validate(m);
  std::vector<PartialOrder> out;
  if (s.kind == StructureKind::Choice) {
    for (int a : s.subset) out.push_back(PartialOrder::choice(s.subset, a));
    return out;
  }
  std::vector<int> pool = s.subset;
  if (s.kind == StructureKind::Top) {
    pool.resize(m);
    std::iota(pool.begin(), pool.end(), 0);
  }
  std::vector<std::vector<int>> tuples;
  std::vector<int> current;
  std::vector<char> used(pool.size(), 0);
  ordered_tuples(pool, s.l, current, used, tuples);
  for (auto& t : tuples) {
    out.push_back(s.kind == StructureKind::Top ? PartialOrder::top(std::move(t))
                                               : PartialOrder::way(std::move(t)));
  }
  return out;
}

}  // namespace mixpl
