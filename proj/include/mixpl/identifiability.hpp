#pragma once

// Non-identifiability witnesses, moment-matrix rank diagnostics and the
// marginal recovery identities used by the identifiability arguments.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>

#include "mixpl/core.hpp"
#include "mixpl/estimation.hpp"
#include "mixpl/sampling.hpp"

namespace mixpl {

// beta_r = prod_{p=1}^{l1-1} (p e_r + m-1-p) * prod_{p=0}^{l2-2} ((m-l2+p) e_r + l2-1-p)
//          / prod_{q != r} (e_r - e_q)
//
// With e ascending, signs alternate and sum(beta) = 0 whenever the numerator
// degree l1+l2-2 is below 2k-1.
Eigen::VectorXd beta_weights(const Eigen::VectorXd& e, int m, int l1, int l2);

// 2k evenly spaced values spanning [0.1, 0.9].
Eigen::VectorXd default_witness_values(int k);

// Two distinct k-component mixtures with identical marginals on every top-l
// (l <= l1) and l'-way (l' <= l2) order. Component r has theta_1 = e_r and
// (1 - e_r)/(m-1) elsewhere; mixture_a collects the components with positive
// beta (alpha proportional to beta), mixture_b those with negative beta.
struct Witness {
  int k = 0;
  int m = 0;
  int l1 = 0;
  int l2 = 1;
  Eigen::VectorXd e;
  Eigen::VectorXd beta;
  MixtureParams mixture_a;
  MixtureParams mixture_b;
};

// Throws PreconditionError naming the violated inequality.
Witness build_witness(int k, int m, int l1, int l2,
                      std::optional<Eigen::VectorXd> e = std::nullopt);

struct WitnessReport {
  double max_discrepancy = 0.0;         // top-l (l <= l1) and l'-way (l' <= l2)
  double max_choice_discrepancy = 0.0;  // choice-l' (l' <= l2)
  double outside_discrepancy = 0.0;     // top-(l1+1) and (l2+1)-way orders
  long orders_checked = 0;
  bool passed = false;
};

// Enumerates every order in the witnessed families. m <= 8, else TooLargeError.
WitnessReport verify_witness(const Witness& w, double tol = 1e-10);

// Column r holds pl_partial_prob of each selected event under components.col(r).
Eigen::MatrixXd moment_matrix(const Eigen::MatrixXd& components,
                              Selector selector = Selector::Top2Way2);

// Singular values above tol * (largest singular value).
int numerical_rank(const Eigen::MatrixXd& matrix, double tol = 1e-9);

using MarginalOracle = std::function<double(const PartialOrder&)>;

// Pr(a_i1 > a_i2 > {a_i3, a_i4}) within the subset, from
//   Pr(a_i2 chosen from {i2,i3,i4}) - Pr(a_i2 chosen from {i1,i2,i3,i4}).
// Throws NegativeResultError when the result falls below -tol.
double choice_to_top2(double choice_from_triple, double choice_from_quad, double tol = 1e-12);

// Same identity with the two choice marginals queried from `marginals`;
// `ordered` is (i1, i2, i3, i4).
double choice_to_top2(const MarginalOracle& marginals, const Group& ordered, double tol = 1e-12);

// With U = target[0..u-2], x = target[u-1] and V the remaining m-u
// alternatives:
//
//   Pr(x above all of V) - sum_{i=1}^{u-1} Pr(x at position i, first i-1 from U)
//
// assembled only from (v+1)-way marginals over {x} u V and top-l marginals
// with l <= u-1. This equals Pr(U occupies the first u-1 positions, then x);
// for u <= 2 that is exactly the ranked top-u order `target`.
// Throws IncoherenceError when the result falls below -tol.
double recover_topu(const MarginalOracle& marginals, int m, std::span<const int> target,
                    double tol = 1e-12);

}  // namespace mixpl
