#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace carbon_ledger;
using namespace carbon_ledger::testing;

TEST(Decimal, ParsesPlainDecimals) {
  EXPECT_EQ(dec("6.25"), Decimal::ratio(25, 4));
  EXPECT_EQ(dec("0.0601"), Decimal::ratio(601, 10000));
  EXPECT_EQ(dec("-3"), Decimal(-3));
  EXPECT_EQ(dec("007.50"), Decimal::ratio(15, 2));
}

TEST(Decimal, RejectsNonPlainText) {
  for (const char* bad : {"", ".", "1.", ".5", "1e3", "1,000", " 1", "+1", "1.2.3", "0x10", "nan", "--1"}) {
    EXPECT_FALSE(Decimal::try_parse(bad).has_value()) << bad;
  }
  EXPECT_THROW(Decimal::parse("1e-3"), DecimalParseError);
}

TEST(Decimal, ShortestExactText) {
  EXPECT_EQ(dec("283750000000").to_string(), "283750000000");
  EXPECT_EQ(dec("15.160").to_string(), "15.16");
  EXPECT_EQ(dec("0.000001").to_string(), "0.000001");
  EXPECT_EQ(Decimal(0).to_string(), "0");
  EXPECT_EQ(dec("-0.5").to_string(), "-0.5");
  EXPECT_THROW(Decimal::ratio(1, 3).to_string(), std::domain_error);
  EXPECT_EQ(Decimal::ratio(1, 3).exact_string(), "1/3");
  EXPECT_EQ(Decimal::parse_exact("1/3"), Decimal::ratio(1, 3));
  EXPECT_EQ(Decimal::parse_exact("2.5"), Decimal::ratio(5, 2));
}

TEST(Decimal, RoundsHalfToEven) {
  EXPECT_EQ(dec("2.5").round_places(0), Decimal(2));
  EXPECT_EQ(dec("3.5").round_places(0), Decimal(4));
  EXPECT_EQ(dec("-2.5").round_places(0), Decimal(-2));
  EXPECT_EQ(dec("0.125").round_places(2), dec("0.12"));
  EXPECT_EQ(dec("0.135").round_places(2), dec("0.14"));
  EXPECT_EQ(dec("1250").round_places(-2), Decimal(1200));
  EXPECT_EQ(dec("1350").round_places(-2), Decimal(1400));
  EXPECT_EQ(Decimal::ratio(2, 3).round_places(3), dec("0.667"));
}

TEST(Decimal, SignificantDigits) {
  EXPECT_EQ(dec("283.75").magnitude(), 2);
  EXPECT_EQ(dec("0.061").magnitude(), -2);
  EXPECT_EQ(dec("1000").magnitude(), 3);
  EXPECT_EQ(dec("999.9999").magnitude(), 2);
  EXPECT_EQ(dec("1077.8448").format_significant(6), "1077.84");
  EXPECT_EQ(dec("1077.8448").format_significant(4), "1078");
  EXPECT_EQ(dec("0.0596596").format_significant(3), "0.0597");
  EXPECT_EQ(dec("9.9996").format_significant(4), "10");
  EXPECT_EQ(Decimal(0).format_significant(6), "0");
  EXPECT_EQ(dec("12.5").format_fixed(0), "12");
  EXPECT_EQ(dec("0.5").format_fixed(3), "0.500");
}

TEST(Decimal, AdditionIsAssociativeAndExact) {
  Gen g(7);
  for (int i = 0; i < 2000; ++i) {
    const Decimal a = g.decimal(1'000'000, 9) / (g.decimal(1000, 3) + Decimal(1));
    const Decimal b = g.decimal(1'000'000, 9);
    const Decimal c = Decimal::ratio(static_cast<std::int64_t>(g.uniform(1, 1000)), 7);
    ASSERT_EQ((a + b) + c, a + (b + c));
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ((a + b) - b, a);
  }
}

TEST(Decimal, ParseFormatRoundTripOnNormalizedTokens) {
  Gen g(11);
  for (int i = 0; i < 2000; ++i) {
    const std::string token = g.decimal(10'000'000'000ULL, static_cast<int>(g.uniform(0, 12))).to_string();
    ASSERT_EQ(Decimal::parse(token).to_string(), token);
  }
}
