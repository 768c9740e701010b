#pragma once

// Closed-form Plackett-Luce marginals for the three structured partial orders,
// their mixtures, and a brute-force enumeration oracle.
//
// Every kernel multiplies per-position ratios theta_i / (remaining mass) rather
// than raw numerators and denominators. Orders longer than kLogSpaceThreshold
// are evaluated in log space.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "mixpl/core.hpp"
#include "mixpl/errors.hpp"

namespace mixpl {

inline constexpr int kLogSpaceThreshold = 30;
inline constexpr int kMaxEnumerationSize = 8;

namespace detail {

// Sum of theta over alternatives that do not appear in `ranked`.
template <typename Derived>
typename Derived::Scalar unranked_mass(const Eigen::MatrixBase<Derived>& theta,
                                       std::span<const int> ranked) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = theta.size();
  Scalar rest(0);
  if (ranked.size() <= 8) {
    for (Eigen::Index j = 0; j < m; ++j) {
      bool listed = false;
      for (int a : ranked) listed = listed || (a == j);
      if (!listed) rest += theta[j];
    }
    return rest;
  }
  std::vector<char> listed(m, 0);
  for (int a : ranked) listed[a] = 1;
  for (Eigen::Index j = 0; j < m; ++j)
    if (!listed[j]) rest += theta[j];
  return rest;
}

// sum_{p < stop} log theta[ranked[p]] - log(tail + sum_{q >= p} theta[ranked[q]])
template <typename Derived>
typename Derived::Scalar sequential_log_product(const Eigen::MatrixBase<Derived>& theta,
                                                std::span<const int> ranked,
                                                typename Derived::Scalar tail, int stop) {
  using std::log;
  using Scalar = typename Derived::Scalar;
  const int l = static_cast<int>(ranked.size());
  Scalar denom = tail;
  for (int p = l - 1; p >= stop; --p) denom += theta[ranked[p]];
  Scalar log_prob(0);
  for (int p = stop - 1; p >= 0; --p) {
    denom += theta[ranked[p]];
    log_prob += log(theta[ranked[p]]) - log(denom);
  }
  return log_prob;
}

// prod_{p < stop} theta[ranked[p]] / (tail + sum_{q >= p} theta[ranked[q]])
template <typename Derived>
typename Derived::Scalar sequential_product(const Eigen::MatrixBase<Derived>& theta,
                                            std::span<const int> ranked,
                                            typename Derived::Scalar tail, int stop) {
  using Scalar = typename Derived::Scalar;
  if (stop > kLogSpaceThreshold) {
    using std::exp;
    return exp(sequential_log_product(theta, ranked, tail, stop));
  }
  const int l = static_cast<int>(ranked.size());
  // Denominators are built back to front so each one is a sum of positive
  // terms; no subtraction happens.
  Scalar denom = tail;
  for (int p = l - 1; p >= stop; --p) denom += theta[ranked[p]];
  Scalar prob(1);
  for (int p = stop - 1; p >= 0; --p) {
    denom += theta[ranked[p]];
    prob *= theta[ranked[p]] / denom;
  }
  return prob;
}

// No validation; callers guarantee o is valid for theta.size().
template <typename Derived>
typename Derived::Scalar partial_prob_unchecked(const Eigen::MatrixBase<Derived>& theta,
                                                const PartialOrder& o) {
  using Scalar = typename Derived::Scalar;
  const auto items = o.items();
  switch (o.kind()) {
    case StructureKind::Top:
      return sequential_product(theta, items, unranked_mass(theta, items), o.size());
    case StructureKind::Way:
      return sequential_product(theta, items, Scalar(0), o.size() - 1);
    case StructureKind::Choice: {
      Scalar mass(0);
      for (int a : items) mass += theta[a];
      return theta[o.chosen()] / mass;
    }
  }
  return Scalar(0);
}

template <typename Derived>
typename Derived::Scalar partial_log_prob_unchecked(const Eigen::MatrixBase<Derived>& theta,
                                                    const PartialOrder& o) {
  using std::log;
  using Scalar = typename Derived::Scalar;
  const auto items = o.items();
  switch (o.kind()) {
    case StructureKind::Top:
      return sequential_log_product(theta, items, unranked_mass(theta, items), o.size());
    case StructureKind::Way:
      return sequential_log_product(theta, items, Scalar(0), o.size() - 1);
    case StructureKind::Choice: {
      Scalar mass(0);
      for (int a : items) mass += theta[a];
      return log(theta[o.chosen()]) - log(mass);
    }
  }
  return Scalar(0);
}

template <typename Derived>
void check_order_fits(const Eigen::MatrixBase<Derived>& theta, const PartialOrder& o) {
  if (theta.size() < 2) throw DimensionError("parameter vector needs m >= 2");
  for (int a : o.items()) {
    if (a >= theta.size()) {
      throw DimensionError("order references alternative " + std::to_string(a + 1) +
                           " but m = " + std::to_string(theta.size()));
    }
  }
  o.validate(static_cast<int>(theta.size()));
}

}  // namespace detail

// Probability of a full ranking: prod_{p=1}^{m-1} theta_{i_p} / sum_{q>=p} theta_{i_q}.
template <typename Derived>
typename Derived::Scalar pl_linear_prob(const Eigen::MatrixBase<Derived>& theta,
                                        const LinearOrder& r) {
  if (r.size() != theta.size()) {
    throw DimensionError("linear order over " + std::to_string(r.size()) +
                         " alternatives, parameter has " + std::to_string(theta.size()));
  }
  r.validate(static_cast<int>(theta.size()));
  return detail::sequential_product(theta, r.ranking(), typename Derived::Scalar(0),
                                    r.size() - 1);
}

// Marginal probability of a top-l, l-way, or choice-l order under one PL model.
template <typename Derived>
typename Derived::Scalar pl_partial_prob(const Eigen::MatrixBase<Derived>& theta,
                                         const PartialOrder& o) {
  detail::check_order_fits(theta, o);
  return detail::partial_prob_unchecked(theta, o);
}

// Natural log of pl_partial_prob; finite even where the probability itself
// underflows.
template <typename Derived>
typename Derived::Scalar pl_partial_log_prob(const Eigen::MatrixBase<Derived>& theta,
                                             const PartialOrder& o) {
  detail::check_order_fits(theta, o);
  return detail::partial_log_prob_unchecked(theta, o);
}

// Probability together with its gradient with respect to theta (theta is not
// assumed normalised, so every coordinate is free).
double pl_partial_prob_with_gradient(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                     const PartialOrder& o, Eigen::Ref<Eigen::VectorXd> gradient);

// sum_r alpha_r * Pr_PL(o | theta^(r))
double mixture_partial_prob(const MixtureParams& params, const PartialOrder& o);

// phi(s, A') * mixture_partial_prob; throws UnknownStructureError when the
// structure of o is not in params.phi.
double model_partial_prob(const MixtureParams& params, const PartialOrder& o);

// True when the linear order r is an extension of o.
bool extends(const LinearOrder& r, const PartialOrder& o);

// Sums pl_linear_prob over every extension of o. m <= 8, else TooLargeError.
double brute_force_partial_prob(const PLParams& theta, const PartialOrder& o);

// Every linear order over m alternatives, in lexicographic order. m <= 8.
std::vector<LinearOrder> all_linear_orders(int m);

// Every partial order with the given structure (all l! rankings of an l-way
// subset, all m!/(m-l)! top-l prefixes, all l choices).
std::vector<PartialOrder> orders_with_structure(const StructureId& s, int m);

}  // namespace mixpl
