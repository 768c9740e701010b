#include "mixpl/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixpl/errors.hpp"

namespace mixpl {

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master ^ (stream + 0x9e3779b97f4a7c15ULL + (master << 6) + (master >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

LinearOrder sample_pl(const PLParams& theta, Rng& rng) {
  const int m = static_cast<int>(theta.size());
  std::vector<int> remaining(m);
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<int> ranking;
  ranking.reserve(m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (remaining.size() > 1) {
    double mass = 0.0;
    for (int a : remaining) mass += theta[a];
    const double target = unit(rng) * mass;
    double acc = 0.0;
    std::size_t pick = remaining.size() - 1;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      acc += theta[remaining[i]];
      if (target < acc) {
        pick = i;
        break;
      }
    }
    ranking.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  ranking.push_back(remaining.front());
  return LinearOrder(std::move(ranking));
}

LinearOrder sample_linear(const MixtureParams& params, Rng& rng) {
  int component = 0;
  if (params.k() > 1) {
    std::discrete_distribution<int> pick(params.alpha.data(), params.alpha.data() + params.k());
    component = pick(rng);
  }
  return sample_pl(params.components.col(component), rng);
}

PartialOrder project(const LinearOrder& r, const StructureId& s) {
  switch (s.kind) {
    case StructureKind::Top: {
      const auto ranking = r.ranking();
      return PartialOrder::top(std::vector<int>(ranking.begin(), ranking.begin() + s.l));
    }
    case StructureKind::Way: {
      const std::vector<int> pos = r.positions();
      std::vector<int> ranked = s.subset;
      std::sort(ranked.begin(), ranked.end(), [&](int a, int b) { return pos[a] < pos[b]; });
      return PartialOrder::way(std::move(ranked));
    }
    case StructureKind::Choice: {
      const std::vector<int> pos = r.positions();
      const int best = *std::min_element(s.subset.begin(), s.subset.end(),
                                         [&](int a, int b) { return pos[a] < pos[b]; });
      return PartialOrder::choice(s.subset, best);
    }
  }
  throw InvariantError("unknown structure kind");
}

Profile sample_profile(const MixtureParams& params, std::int64_t n, Rng& rng) {
  if (!params.phi) throw UnknownStructureError("sampling partial orders requires phi");
  if (n < 0) throw PreconditionError("sample size must be non-negative");
  std::vector<StructureId> structures;
  std::vector<double> weights;
  for (const auto& [s, p] : params.phi->entries()) {
    structures.push_back(s);
    weights.push_back(p);
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  Profile profile;
  profile.m = params.m();
  profile.orders.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) {
    const LinearOrder r = sample_linear(params, rng);
    profile.orders.push_back(project(r, structures[pick(rng)]));
  }
  return profile;
}

Profile sample_linear_profile(const MixtureParams& params, std::int64_t n, Rng& rng) {
  if (n < 0) throw PreconditionError("sample size must be non-negative");
  const StructureId full = StructureId::top(params.m() - 1);
  Profile profile;
  profile.m = params.m();
  profile.orders.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) profile.orders.push_back(project(sample_linear(params, rng), full));
  return profile;
}

MixtureParams random_truth(int m, int k, Rng& rng) {
  if (m < 2 || k < 1) throw DimensionError("random_truth needs m >= 2 and k >= 1");
  // Open interval (0, 1).
  std::uniform_real_distribution<double> unit(std::nextafter(0.0, 1.0), 1.0);
  MixtureParams params;
  params.alpha.resize(k);
  for (int r = 0; r < k; ++r) params.alpha[r] = unit(rng);
  params.alpha /= params.alpha.sum();
  params.components.resize(m, k);
  for (int r = 0; r < k; ++r) {
    for (int i = 0; i < m; ++i) params.components(i, r) = unit(rng);
    params.components.col(r) /= params.components.col(r).sum();
  }
  return params;
}

std::vector<Group> choice_groups(int m) {
  if (m < 4) throw DimensionError("choice grouping needs m >= 4");
  const int count = (m - 1 + 2) / 3;
  std::vector<Group> groups;
  for (int t = 0; t < count; ++t) {
    const int first = 3 * t + 1;
    if (first + 2 <= m - 1) {
      groups.push_back({0, first, first + 1, first + 2});
    } else {
      groups.push_back({0, m - 3, m - 2, m - 1});
    }
  }
  return groups;
}

StructureDistribution setup_top2_2way(int m) {
  if (m < 4) throw DimensionError("top-2 and 2-way setup needs m >= 4");
  StructureDistribution phi;
  phi.add(StructureId::top(2), 0.5);
  const double pair = 1.0 / (static_cast<double>(m) * (m - 1));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) phi.add(StructureId::way({i, j}), pair);
  return phi;
}

ChoiceSetup setup_choice234(int m) {
  ChoiceSetup setup;
  setup.groups = choice_groups(m);
  const double scale = 1.0 / static_cast<double>(setup.groups.size());
  constexpr double kGroupTotal = 4.0 + 4 * 3.0 + 6 * 1.0;
  for (const Group& g : setup.groups) {
    setup.phi.add(StructureId::choice({g[0], g[1], g[2], g[3]}), scale * 4.0 / kGroupTotal);
    for (int drop = 0; drop < 4; ++drop) {
      std::vector<int> triple;
      for (int i = 0; i < 4; ++i)
        if (i != drop) triple.push_back(g[i]);
      setup.phi.add(StructureId::choice(triple), scale * 3.0 / kGroupTotal);
    }
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        setup.phi.add(StructureId::choice({g[i], g[j]}), scale * 1.0 / kGroupTotal);
  }
  return setup;
}

}  // namespace mixpl
