#include <gtest/gtest.h>

#include "mixpl/errors.hpp"
#include "mixpl/identifiability.hpp"
#include "mixpl/probability.hpp"
#include "oracle.hpp"

using namespace mixpl;

TEST(BetaWeights, SingleComponentBothProductsEmpty) {
  const Eigen::Vector2d e(0.2, 0.7);
  const Eigen::VectorXd beta = beta_weights(e, 2, 1, 1);
  EXPECT_NEAR(beta[0], -1.0 / 0.5, 1e-12);
  EXPECT_NEAR(beta[1], 1.0 / 0.5, 1e-12);
}

TEST(BetaWeights, AlternatingSignsAndZeroSum) {
  const Eigen::Vector4d e(0.1, 0.2, 0.3, 0.4);
  const Eigen::VectorXd beta = beta_weights(e, 4, 1, 2);
  EXPECT_LT(beta[0], 0);
  EXPECT_GT(beta[1], 0);
  EXPECT_LT(beta[2], 0);
  EXPECT_GT(beta[3], 0);
  EXPECT_NEAR(beta.sum(), 0.0, 1e-9);
}

TEST(BetaWeights, Preconditions) {
  EXPECT_THROW(beta_weights(Eigen::Vector3d(0.1, 0.1, 0.5), 4, 1, 1), DuplicateError);
  EXPECT_THROW(beta_weights(Eigen::Vector2d(0.5, 0.1), 4, 1, 1), PreconditionError);
  EXPECT_THROW(beta_weights(Eigen::Vector2d(0.0, 0.5), 4, 1, 1), PreconditionError);
}

TEST(Witness, FourAlternativesTopOnePairs) {
  const Witness w = build_witness(2, 4, 1, 2, Eigen::VectorXd(Eigen::Vector4d(0.1, 0.2, 0.3, 0.4)));
  EXPECT_EQ(w.mixture_a.k(), 2);
  EXPECT_EQ(w.mixture_b.k(), 2);
  EXPECT_NO_THROW(w.mixture_a.validate());
  EXPECT_NO_THROW(w.mixture_b.validate());
  EXPECT_GT(mse(w.mixture_a, w.mixture_b), 1e-3);
  const WitnessReport report = verify_witness(w);
  EXPECT_TRUE(report.passed);
  EXPECT_LE(report.max_discrepancy, 1e-10);
  EXPECT_LE(report.max_choice_discrepancy, 1e-10);
  EXPECT_GT(report.outside_discrepancy, 1e-6);
}

TEST(Witness, AgreesUnderTheTestOracle) {
  const Witness w = build_witness(2, 4, 1, 2);
  for (int a = 0; a < 4; ++a) {
    const PartialOrder top1 = PartialOrder::top({a});
    EXPECT_NEAR(oracle::mixture_marginal(w.mixture_a, top1), oracle::mixture_marginal(w.mixture_b, top1), 1e-12);
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      const PartialOrder pair = PartialOrder::way({a, b});
      EXPECT_NEAR(oracle::mixture_marginal(w.mixture_a, pair), oracle::mixture_marginal(w.mixture_b, pair), 1e-12);
    }
  }
  double top2_gap = 0.0;
  for (const PartialOrder& o : orders_with_structure(StructureId::top(2), 4))
    top2_gap = std::max(top2_gap, std::abs(oracle::mixture_marginal(w.mixture_a, o) - oracle::mixture_marginal(w.mixture_b, o)));
  EXPECT_GT(top2_gap, 1e-6);
}

TEST(Witness, IdentifiableRegimeHasNoWitness) {
  try {
    build_witness(2, 4, 3, 1);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("(l1+l2+1)/2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(build_witness(3, 5, 1, 1), PreconditionError);
  EXPECT_THROW(build_witness(2, 4, 1, 2, Eigen::VectorXd(Eigen::Vector3d(0.1, 0.2, 0.3))), PreconditionError);
}

TEST(Witness, SingleComponentOneWay) {
  const Witness w = build_witness(1, 2, 0, 1);
  EXPECT_NE(w.mixture_a.components.col(0), w.mixture_b.components.col(0));
  const WitnessReport report = verify_witness(w);
  EXPECT_TRUE(report.passed);
  EXPECT_GT(report.outside_discrepancy, 1e-6);
}

TEST(Witness, EveryValidSmallConfiguration) {
  for (int m = 2; m <= 6; ++m) {
    for (int k = 1; 2 * k <= m; ++k) {
      for (int l1 = 0; l1 <= m - 1; ++l1) {
        for (int l2 = 1; l2 <= m; ++l2) {
          if (2 * k < l1 + l2 + 1) continue;
          const WitnessReport report = verify_witness(build_witness(k, m, l1, l2));
          EXPECT_LE(report.max_discrepancy, 1e-10) << k << m << l1 << l2;
          EXPECT_LE(report.max_choice_discrepancy, 1e-10) << k << m << l1 << l2;
        }
      }
    }
  }
}

TEST(NumericalRank, Basics) {
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Identity(4, 4)), 4);
  const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(6, 1, 6);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(3, -1, 1);
  EXPECT_EQ(numerical_rank(u * v.transpose()), 1);
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Zero(3, 3)), 0);
}

TEST(MomentMatrix, IdenticalComponentsRankOne) {
  Eigen::MatrixXd c(4, 4);
  for (int r = 0; r < 4; ++r) c.col(r) << 0.1, 0.2, 0.3, 0.4;
  EXPECT_EQ(numerical_rank(moment_matrix(c)), 1);
}

TEST(MomentMatrix, RankFollowsDistinctComponents) {
  std::mt19937_64 rng(41);
  const Eigen::VectorXd p = oracle::random_simplex(4, rng, 0.1);
  const Eigen::VectorXd q = oracle::random_simplex(4, rng, 0.1);
  Eigen::MatrixXd c(4, 4);
  c << p, q, p, q;
  EXPECT_EQ(numerical_rank(moment_matrix(c)), 2);
}

TEST(MomentMatrix, RandomComponentsRankFour) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd c(4, 4);
    for (int r = 0; r < 4; ++r) c.col(r) = oracle::random_simplex(4, rng);
    EXPECT_EQ(numerical_rank(moment_matrix(c)), 4);
  }
}

TEST(MomentMatrix, AffineFamilyHasFullRank) {
  // theta^(r) = [e, p2 e - p2, p3 e - p3, -(1+p2+p3) e + (1+p2+p3)] with p2 = p3 = -1/3
  const double p2 = -1.0 / 3, p3 = -1.0 / 3;
  const Eigen::Vector4d e(0.15, 0.35, 0.55, 0.75);
  Eigen::MatrixXd c(4, 4);
  for (int r = 0; r < 4; ++r) {
    c(0, r) = e[r];
    c(1, r) = p2 * e[r] - p2;
    c(2, r) = p3 * e[r] - p3;
    c(3, r) = -(1 + p2 + p3) * e[r] + (1 + p2 + p3);
  }
  for (int r = 0; r < 4; ++r) EXPECT_NEAR(c.col(r).sum(), 1.0, 1e-15);
  EXPECT_EQ(numerical_rank(moment_matrix(c)), 4);
  // the same family with an asymmetric split
  for (int r = 0; r < 4; ++r) {
    const double q2 = -0.2, q3 = -0.45;
    c(1, r) = q2 * e[r] - q2;
    c(2, r) = q3 * e[r] - q3;
    c(3, r) = -(1 + q2 + q3) * e[r] + (1 + q2 + q3);
  }
  EXPECT_EQ(numerical_rank(moment_matrix(c)), 4);
}

TEST(ChoiceToTop2, Examples) {
  const Eigen::Vector4d theta(0.1, 0.2, 0.3, 0.4);
  const MarginalOracle pl = [&](const PartialOrder& o) { return pl_partial_prob(theta, o); };
  const double value = choice_to_top2(pl, Group{0, 1, 2, 3});
  EXPECT_NEAR(value, 0.2 / 0.9 - 0.2, 1e-15);
  // a1 > a2 > {a3, a4} within the subset, enumerated by the test oracle
  const double direct = oracle::marginal(theta, PartialOrder::way({0, 1, 2, 3})) +
                        oracle::marginal(theta, PartialOrder::way({0, 1, 3, 2}));
  EXPECT_NEAR(value, direct, 1e-12);

  const Eigen::Vector4d uniform = Eigen::Vector4d::Constant(0.25);
  const MarginalOracle flat = [&](const PartialOrder& o) { return pl_partial_prob(uniform, o); };
  EXPECT_NEAR(choice_to_top2(flat, Group{0, 1, 2, 3}), 1.0 / 12, 1e-15);
}

TEST(ChoiceToTop2, MixtureByLinearity) {
  std::mt19937_64 rng(43);
  const MixtureParams p = oracle::random_mixture(5, 2, rng);
  const MarginalOracle mix = [&](const PartialOrder& o) { return mixture_partial_prob(p, o); };
  const double direct = oracle::mixture_marginal(p, PartialOrder::way({3, 0, 1, 4})) +
                        oracle::mixture_marginal(p, PartialOrder::way({3, 0, 4, 1}));
  EXPECT_NEAR(choice_to_top2(mix, Group{3, 0, 1, 4}), direct, 1e-12);
}

TEST(ChoiceToTop2, IncoherentInputs) {
  EXPECT_THROW(choice_to_top2(0.2, 0.3), NegativeResultError);
  EXPECT_NEAR(choice_to_top2(0.3, 0.3 + 1e-14), 0.0, 1e-13);
}

TEST(RecoverTopU, TopTwoExample) {
  const Eigen::Vector4d theta(0.1, 0.2, 0.3, 0.4);
  const MarginalOracle pl = [&](const PartialOrder& o) { return pl_partial_prob(theta, o); };
  const std::vector<int> target = {0, 1};
  EXPECT_NEAR(recover_topu(pl, 4, target), pl_partial_prob(theta, PartialOrder::top({0, 1})), 1e-12);
}

TEST(RecoverTopU, BaseCase) {
  std::mt19937_64 rng(44);
  const Eigen::VectorXd theta = oracle::random_simplex(5, rng);
  const MarginalOracle pl = [&](const PartialOrder& o) { return pl_partial_prob(theta, o); };
  for (int a = 0; a < 5; ++a) {
    const std::vector<int> target = {a};
    EXPECT_NEAR(recover_topu(pl, 5, target), theta[a], 1e-12);
  }
}

TEST(RecoverTopU, LongerTargetsRecoverTheSetThenX) {
  std::mt19937_64 rng(45);
  const MixtureParams p = oracle::random_mixture(5, 2, rng);
  const MarginalOracle mix = [&](const PartialOrder& o) { return mixture_partial_prob(p, o); };
  const std::vector<int> target = {4, 1, 2};
  // {a5, a2} fill the first two positions in either order, then a3
  const double direct = oracle::mixture_marginal(p, PartialOrder::top({4, 1, 2})) +
                        oracle::mixture_marginal(p, PartialOrder::top({1, 4, 2}));
  EXPECT_NEAR(recover_topu(mix, 5, target), direct, 1e-12);
}

TEST(RecoverTopU, Preconditions) {
  const MarginalOracle zero = [](const PartialOrder&) { return 0.0; };
  const std::vector<int> too_long = {0, 1, 2, 3};
  EXPECT_THROW(recover_topu(zero, 4, too_long), PreconditionError);
  const MarginalOracle bad = [](const PartialOrder& o) { return o.kind() == StructureKind::Top ? 1.0 : 0.0; };
  const std::vector<int> target = {0, 1};
  EXPECT_THROW(recover_topu(bad, 4, target), IncoherenceError);
}
