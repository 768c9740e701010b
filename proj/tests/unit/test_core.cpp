#include <gtest/gtest.h>

#include "mixpl/core.hpp"
#include "mixpl/errors.hpp"
#include "mixpl/sampling.hpp"

using namespace mixpl;

TEST(StructureKey, RoundTrips) {
  for (const StructureId& s : {StructureId::top(2), StructureId::way({0, 2, 3}), StructureId::choice({0, 1})}) {
    EXPECT_EQ(parse_structure_key(structure_key(s)), s);
  }
  EXPECT_EQ(structure_key(StructureId::way({3, 0, 2})), "way-3:1,3,4");
  EXPECT_EQ(structure_key(StructureId::top(2)), "top-2");
  EXPECT_THROW(parse_structure_key("way-2:1"), InvariantError);
  EXPECT_THROW(parse_structure_key("zigzag-2"), Error);
}

TEST(PartialOrder, RejectsDuplicates) {
  EXPECT_THROW(PartialOrder::way({2, 2, 0}), InvariantError);
  EXPECT_THROW(PartialOrder::top({1, 1}), InvariantError);
  EXPECT_THROW(PartialOrder::choice({0, 1, 2}, 3), InvariantError);
}

TEST(PartialOrder, LengthBounds) {
  EXPECT_NO_THROW(PartialOrder::top({0, 1, 2}).validate(4));
  EXPECT_THROW(PartialOrder::top({0, 1, 2, 3}).validate(4), InvariantError);
  EXPECT_NO_THROW(PartialOrder::way({0, 1, 2, 3}).validate(4));
  EXPECT_THROW(PartialOrder::way({0, 4}).validate(4), InvariantError);
}

TEST(PartialOrder, ChoiceSubsetIsSorted) {
  const PartialOrder o = PartialOrder::choice({2, 0, 1}, 2);
  EXPECT_EQ(std::vector<int>(o.items().begin(), o.items().end()), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(o.structure(), StructureId::choice({0, 1, 2}));
}

TEST(LinearOrder, Positions) {
  const LinearOrder r({1, 2, 3, 0});
  EXPECT_EQ(r.positions(), (std::vector<int>{3, 0, 1, 2}));
  EXPECT_THROW(LinearOrder({0, 0, 1}), InvariantError);
}

namespace {

StructureDistribution phi_of(std::initializer_list<std::pair<StructureId, double>> entries) {
  StructureDistribution phi;
  for (const auto& [s, p] : entries) phi.add(s, p);
  return phi;
}

}  // namespace

TEST(ValidateStructureSet, DisjointStructuresAreValid) {
  const auto phi = phi_of({{StructureId::top(1), 0.5}, {StructureId::way({0, 1}), 0.5}});
  EXPECT_TRUE(validate_structure_set(phi, 4).ok());
}

TEST(ValidateStructureSet, PairwayAndPairChoiceOverlap) {
  const auto phi = phi_of({{StructureId::way({0, 1}), 0.5}, {StructureId::choice({0, 1}), 0.5}});
  const auto v = validate_structure_set(phi, 4);
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.violations.front().rule, StructureViolation::Rule::Overlap);
  EXPECT_THROW(v.throw_if_invalid(), OverlapError);
}

TEST(ValidateStructureSet, TopMinusOneAndFullWayOverlap) {
  const auto phi = phi_of({{StructureId::top(3), 0.5}, {StructureId::way({0, 1, 2, 3}), 0.5}});
  EXPECT_THROW(validate_structure_set(phi, 4).throw_if_invalid(), OverlapError);
}

TEST(ValidateStructureSet, SumAndPositivity) {
  EXPECT_THROW(validate_structure_set(phi_of({{StructureId::top(1), 0.7}}), 4).throw_if_invalid(), SumError);
  EXPECT_THROW(validate_structure_set(phi_of({{StructureId::top(1), 1.0}, {StructureId::top(2), 0.0}}), 4)
                   .throw_if_invalid(),
               NonPositiveError);
}

TEST(ValidateStructureSet, AcceptsBenchmarkSetups) {
  for (int m : {4, 5, 6, 7, 10}) {
    EXPECT_TRUE(validate_structure_set(setup_top2_2way(m), m).ok()) << m;
    EXPECT_TRUE(validate_structure_set(setup_choice234(m).phi, m).ok()) << m;
  }
}

TEST(MixtureParams, Validation) {
  MixtureParams p;
  p.alpha = Eigen::Vector2d(0.2, 0.8);
  p.components.resize(4, 2);
  p.components.col(0) << 0.1, 0.2, 0.3, 0.4;
  p.components.col(1) << 0.2, 0.2, 0.3, 0.3;
  EXPECT_NO_THROW(p.validate());
  EXPECT_THROW(p.validate(0.15), InvariantError);
  p.alpha = Eigen::Vector2d(0.3, 0.8);
  EXPECT_THROW(p.validate(), InvariantError);
  p.alpha = Eigen::Vector3d(0.2, 0.3, 0.5);
  EXPECT_THROW(p.validate(), DimensionError);
}
