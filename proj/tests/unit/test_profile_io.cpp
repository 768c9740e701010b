#include <gtest/gtest.h>

#include <sstream>

#include "mixpl/errors.hpp"
#include "mixpl/profile_io.hpp"
#include "mixpl/sampling.hpp"

using namespace mixpl;

TEST(ParseOrderLine, Top) {
  const PartialOrder o = parse_order_line(R"({"kind":"top","m":4,"ranked":[2,3]})", 4);
  EXPECT_EQ(o, PartialOrder::top({1, 2}));
}

TEST(ParseOrderLine, Choice) {
  const PartialOrder o = parse_order_line(R"({"kind":"choice","m":4,"subset":[1,2,3],"chosen":3})", 4);
  EXPECT_EQ(o, PartialOrder::choice({0, 1, 2}, 2));
}

TEST(ParseOrderLine, DuplicateIsInvariantError) {
  EXPECT_THROW(parse_order_line(R"({"kind":"way","m":4,"ranked":[3,3,1]})", 4), InvariantError);
}

TEST(ParseOrderLine, Malformed) {
  EXPECT_THROW(parse_order_line("{not json", 4, 7), ParseError);
  EXPECT_THROW(parse_order_line(R"({"kind":"top","m":5,"ranked":[1]})", 4), Error);
  EXPECT_THROW(parse_order_line(R"({"kind":"top","m":4,"ranked":[5]})", 4), Error);
  try {
    parse_order_line("{not json", 4, 7);
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
}

TEST(ProfileIo, RoundTripIsByteExact) {
  const std::string text =
      "{\"m\":4}\n"
      "{\"kind\":\"top\",\"m\":4,\"ranked\":[2,3]}\n"
      "{\"kind\":\"way\",\"m\":4,\"ranked\":[3,4,1]}\n"
      "{\"kind\":\"choice\",\"m\":4,\"subset\":[1,2,3],\"chosen\":3}\n";
  std::istringstream in(text);
  const Profile p = read_profile(in);
  ASSERT_EQ(p.orders.size(), 3u);
  std::ostringstream out;
  write_profile(out, p);
  EXPECT_EQ(out.str(), text);
}

TEST(ProfileIo, RoundTripOfSampledProfile) {
  Rng rng(5);
  MixtureParams truth = random_truth(6, 2, rng);
  truth.phi = setup_choice234(6).phi;
  const Profile p = sample_profile(truth, 500, rng);
  std::ostringstream first;
  write_profile(first, p);
  std::istringstream in(first.str());
  std::ostringstream second;
  write_profile(second, read_profile(in));
  EXPECT_EQ(first.str(), second.str());
}

TEST(ProfileIo, ErrorsCarryLineNumbers) {
  std::istringstream in("{\"m\":3}\n{\"kind\":\"top\",\"m\":3,\"ranked\":[1]}\n\n{\"kind\":\"top\"\n");
  try {
    read_profile(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(ProfileIo, MissingHeader) {
  std::istringstream in("");
  EXPECT_THROW(read_profile(in), Error);
}
