#include "mixpl/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixpl/errors.hpp"
#include "mixpl/probability.hpp"

namespace mixpl {
namespace {

void check_witness_preconditions(int k, int m, int l1, int l2) {
  if (k < 1) throw PreconditionError("k >= 1 violated");
  if (m < 2 * k) {
    throw PreconditionError("m >= 2k violated (m=" + std::to_string(m) + ", k=" + std::to_string(k) + ")");
  }
  if (l1 < 0 || l1 > m - 1) throw PreconditionError("0 <= l1 <= m-1 violated");
  if (l2 < 1 || l2 > m) throw PreconditionError("1 <= l2 <= m violated");
  if (2 * k < l1 + l2 + 1) {
    throw PreconditionError("k >= (l1+l2+1)/2 violated (k=" + std::to_string(k) +
                            ", l1=" + std::to_string(l1) + ", l2=" + std::to_string(l2) + ")");
  }
}

MixtureParams mixture_from(const Eigen::MatrixXd& components, const std::vector<int>& members,
                           const Eigen::VectorXd& weights) {
  MixtureParams params;
  params.alpha.resize(static_cast<Eigen::Index>(members.size()));
  params.components.resize(components.rows(), static_cast<Eigen::Index>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i) {
    params.alpha[static_cast<Eigen::Index>(i)] = weights[members[i]];
    params.components.col(static_cast<Eigen::Index>(i)) = components.col(members[i]);
  }
  return params;
}

// All size-l subsets of 0..m-1, ascending.
std::vector<std::vector<int>> subsets_of_size(int m, int l) {
  std::vector<std::vector<int>> out;
  std::vector<char> mask(m, 0);
  std::fill(mask.begin(), mask.begin() + l, 1);
  do {
    std::vector<int> subset;
    for (int a = 0; a < m; ++a)
      if (mask[a]) subset.push_back(a);
    out.push_back(std::move(subset));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

// Ordered tuples of length len with distinct entries from pool.
void for_each_tuple(const std::vector<int>& pool, int len, std::vector<int>& prefix,
                    const std::function<void(const std::vector<int>&)>& visit) {
  if (static_cast<int>(prefix.size()) == len) {
    visit(prefix);
    return;
  }
  for (int a : pool) {
    if (std::find(prefix.begin(), prefix.end(), a) != prefix.end()) continue;
    prefix.push_back(a);
    for_each_tuple(pool, len, prefix, visit);
    prefix.pop_back();
  }
}

}  // namespace

Eigen::VectorXd beta_weights(const Eigen::VectorXd& e, int m, int l1, int l2) {
  const Eigen::Index count = e.size();
  for (Eigen::Index r = 0; r < count; ++r) {
    if (!(e[r] > 0.0 && e[r] < 1.0)) throw PreconditionError("witness values must lie in (0, 1)");
    for (Eigen::Index q = 0; q < r; ++q)
      if (e[q] == e[r]) throw DuplicateError("repeated witness value " + std::to_string(e[r]));
  }
  for (Eigen::Index r = 1; r < count; ++r)
    if (e[r] < e[r - 1]) throw PreconditionError("witness values must be ascending");

  Eigen::VectorXd beta(count);
  for (Eigen::Index r = 0; r < count; ++r) {
    double numerator = 1.0;
    for (int p = 1; p <= l1 - 1; ++p) numerator *= p * e[r] + m - 1 - p;
    for (int p = 0; p <= l2 - 2; ++p) numerator *= (m - l2 + p) * e[r] + l2 - 1 - p;
    double denominator = 1.0;
    for (Eigen::Index q = 0; q < count; ++q)
      if (q != r) denominator *= e[r] - e[q];
    beta[r] = numerator / denominator;
  }
  return beta;
}

Eigen::VectorXd default_witness_values(int k) {
  const int count = 2 * k;
  Eigen::VectorXd e(count);
  for (int r = 0; r < count; ++r) e[r] = count == 1 ? 0.5 : 0.1 + 0.8 * r / (count - 1);
  return e;
}

Witness build_witness(int k, int m, int l1, int l2, std::optional<Eigen::VectorXd> e) {
  check_witness_preconditions(k, m, l1, l2);
  Witness w;
  w.k = k;
  w.m = m;
  w.l1 = l1;
  w.l2 = l2;
  w.e = e ? *e : default_witness_values(k);
  if (w.e.size() != 2 * k) {
    throw PreconditionError("witness needs exactly 2k = " + std::to_string(2 * k) + " values");
  }
  w.beta = beta_weights(w.e, m, l1, l2);

  Eigen::MatrixXd components(m, 2 * k);
  for (int r = 0; r < 2 * k; ++r) {
    components.col(r).setConstant((1.0 - w.e[r]) / (m - 1));
    components(0, r) = w.e[r];
  }

  std::vector<int> positive, negative;
  for (int r = 0; r < 2 * k; ++r) (w.beta[r] > 0.0 ? positive : negative).push_back(r);
  if (static_cast<int>(positive.size()) != k) {
    throw InvariantError("beta has " + std::to_string(positive.size()) + " positive entries, expected " +
                         std::to_string(k));
  }
  double pos_total = 0.0, neg_total = 0.0;
  for (int r : positive) pos_total += w.beta[r];
  for (int r : negative) neg_total -= w.beta[r];
  if (std::abs(pos_total - neg_total) > 1e-9 * pos_total) {
    throw InvariantError("beta halves do not balance: " + std::to_string(pos_total) + " vs " +
                         std::to_string(neg_total));
  }
  const Eigen::VectorXd weights = w.beta.cwiseAbs() / pos_total;
  w.mixture_a = mixture_from(components, positive, weights);
  w.mixture_b = mixture_from(components, negative, weights);
  // alpha sums are exact only up to rounding of the two halves
  w.mixture_a.alpha /= w.mixture_a.alpha.sum();
  w.mixture_b.alpha /= w.mixture_b.alpha.sum();
  return w;
}

WitnessReport verify_witness(const Witness& w, double tol) {
  const int m = w.m;
  if (m > kMaxEnumerationSize) {
    throw TooLargeError("witness verification enumerates orders; needs m <= " +
                        std::to_string(kMaxEnumerationSize));
  }
  WitnessReport report;
  auto gap = [&](const PartialOrder& o) {
    ++report.orders_checked;
    return std::abs(mixture_partial_prob(w.mixture_a, o) - mixture_partial_prob(w.mixture_b, o));
  };

  for (int l = 1; l <= w.l1; ++l)
    for (const PartialOrder& o : orders_with_structure(StructureId::top(l), m))
      report.max_discrepancy = std::max(report.max_discrepancy, gap(o));
  for (int l = 1; l <= w.l2; ++l) {
    for (const auto& subset : subsets_of_size(m, l)) {
      for (const PartialOrder& o : orders_with_structure(StructureId::way(subset), m))
        report.max_discrepancy = std::max(report.max_discrepancy, gap(o));
      for (const PartialOrder& o : orders_with_structure(StructureId::choice(subset), m))
        report.max_choice_discrepancy = std::max(report.max_choice_discrepancy, gap(o));
    }
  }

  if (w.l1 + 1 <= m - 1)
    for (const PartialOrder& o : orders_with_structure(StructureId::top(w.l1 + 1), m))
      report.outside_discrepancy = std::max(report.outside_discrepancy, gap(o));
  if (w.l2 + 1 <= m)
    for (const auto& subset : subsets_of_size(m, w.l2 + 1))
      for (const PartialOrder& o : orders_with_structure(StructureId::way(subset), m))
        report.outside_discrepancy = std::max(report.outside_discrepancy, gap(o));

  report.passed = report.max_discrepancy <= tol && report.max_choice_discrepancy <= tol;
  return report;
}

Eigen::MatrixXd moment_matrix(const Eigen::MatrixXd& components, Selector selector) {
  const int m = static_cast<int>(components.rows());
  const MomentSet moments = select_moments(selector, m);
  Eigen::MatrixXd f(moments.size(), components.cols());
  for (int t = 0; t < moments.size(); ++t)
    for (Eigen::Index r = 0; r < components.cols(); ++r)
      f(t, r) = pl_partial_prob(components.col(r), moments.events[t].event);
  return f;
}

int numerical_rank(const Eigen::MatrixXd& matrix, double tol) {
  if (matrix.size() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double largest = sigma.size() ? sigma[0] : 0.0;
  if (largest <= 0.0) return 0;
  return static_cast<int>((sigma.array() > tol * largest).count());
}

double choice_to_top2(double choice_from_triple, double choice_from_quad, double tol) {
  const double result = choice_from_triple - choice_from_quad;
  if (result < -tol) {
    throw NegativeResultError("incoherent choice marginals: decomposition gives " +
                              std::to_string(result));
  }
  return result;
}

double choice_to_top2(const MarginalOracle& marginals, const Group& ordered, double tol) {
  const auto [i1, i2, i3, i4] = ordered;
  return choice_to_top2(marginals(PartialOrder::choice({i2, i3, i4}, i2)),
                        marginals(PartialOrder::choice({i1, i2, i3, i4}, i2)), tol);
}

double recover_topu(const MarginalOracle& marginals, int m, std::span<const int> target, double tol) {
  const int u = static_cast<int>(target.size());
  if (u < 1 || u > m - 1) throw PreconditionError("recover_topu needs 1 <= u <= m-1");
  PartialOrder::top(std::vector<int>(target.begin(), target.end())).validate(m);

  const int x = target[u - 1];
  const std::vector<int> before(target.begin(), target.end() - 1);
  std::vector<int> rest;
  for (int a = 0; a < m; ++a)
    if (std::find(target.begin(), target.end(), a) == target.end()) rest.push_back(a);

  // x above every member of V: all (v+1)-way orders over {x} u V led by x.
  double above_rest = 0.0;
  std::vector<int> tail = rest;
  std::sort(tail.begin(), tail.end());
  do {
    std::vector<int> ranked{x};
    ranked.insert(ranked.end(), tail.begin(), tail.end());
    above_rest += marginals(PartialOrder::way(std::move(ranked)));
  } while (std::next_permutation(tail.begin(), tail.end()));

  // x at position i < u, preceded only by members of U: top-i orders.
  double earlier = 0.0;
  for (int i = 1; i <= u - 1; ++i) {
    std::vector<int> prefix;
    for_each_tuple(before, i - 1, prefix, [&](const std::vector<int>& tuple) {
      std::vector<int> ranked = tuple;
      ranked.push_back(x);
      earlier += marginals(PartialOrder::top(std::move(ranked)));
    });
  }

  const double result = above_rest - earlier;
  if (result < -tol) {
    throw IncoherenceError("incoherent marginals: recovered probability " + std::to_string(result));
  }
  return result;
}

}  // namespace mixpl
