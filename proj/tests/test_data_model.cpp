#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "confpi/errors.hpp"
#include "confpi/types.hpp"
#include "helpers.hpp"

using namespace confpi;
using testing_helpers::make_panel;

TEST(Dates, RoundTripAndWeekday) {
  const Date d = parse_date("2013-01-07");
  EXPECT_EQ(format_date(d), "2013-01-07");
  EXPECT_EQ(weekday_index(d), 1u);  // Monday
  EXPECT_EQ(weekday_index(parse_date("2013-01-12")), 6u);
  EXPECT_EQ(weekday_index(parse_date("2013-01-13")), 0u);
  EXPECT_THROW(parse_date("2013-13-01"), std::invalid_argument);
  EXPECT_THROW(parse_date("yesterday"), std::invalid_argument);
}

TEST(ValidatePanel, WellFormedTenDays) {
  const auto p = make_panel(10, [](std::size_t d, int h) { return 30.0 + d + h; });
  EXPECT_TRUE(validate_panel(p).empty());
}

TEST(ValidatePanel, NanCellNamed) {
  auto p = make_panel(10, [](std::size_t, int) { return 30.0; });
  p.prices(3, 12) = std::nan("");
  const auto v = validate_panel(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].day, 3u);
  EXPECT_EQ(v[0].hour, 12);
}

TEST(ValidatePanel, DateGap) {
  auto p = make_panel(2, [](std::size_t, int) { return 30.0; }, "2013-01-01");
  p.dates[1] = parse_date("2013-01-03");
  const auto v = validate_panel(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].message.find("gap"), std::string::npos);
}

TEST(ValidatePanel, ExogShapeMismatch) {
  auto p = make_panel(5, [](std::size_t, int) { return 30.0; });
  p.exog["load"] = DayMatrix::Zero(4, 24);
  EXPECT_FALSE(validate_panel(p).empty());
}

TEST(DesignRow, VectorLayoutMatchesColumnConstants) {
  DesignRow r;
  r.ar1 = 1;
  r.ar2 = 2;
  r.ar7 = 3;
  r.y_min_prev = 4;
  r.y_max_prev = 5;
  r.d_sat = 1;
  r.pca1 = 9;
  r.pca2 = 10;
  r.pca3 = 11;
  r.y_h24_prev = 12;
  r.delta = 1;
  r.fundamentals = {100, 200};
  const auto v = r.to_vector();
  ASSERT_EQ(v.size(), 16);
  EXPECT_EQ(v(design_col::kIntercept), 1.0);
  EXPECT_EQ(v(design_col::kAr1), 1.0);
  EXPECT_EQ(v(design_col::kAr7), 3.0);
  EXPECT_EQ(v(design_col::kMaxPrev), 5.0);
  EXPECT_EQ(v(design_col::kSat), 1.0);
  EXPECT_EQ(v(design_col::kPca3), 11.0);
  EXPECT_EQ(v(design_col::kH24Prev), 12.0);
  EXPECT_EQ(v(design_col::kDelta), 1.0);
  EXPECT_EQ(v(design_col::kFirstFundamental + 1), 200.0);
  EXPECT_EQ(DesignRow::field_names({"load", "wind"}).size(), 16u);
}

class SplitPlanProperty : public ::testing::TestWithParam<std::size_t> {};

TEST_P(SplitPlanProperty, PartitionAndSize) {
  const std::size_t n = GetParam();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = SplitPlan::draw(n, 0.75, seed);
    EXPECT_EQ(s.train_idx.size(), static_cast<std::size_t>(std::llround(0.75 * n)));
    std::set<std::size_t> all(s.train_idx.begin(), s.train_idx.end());
    for (const auto i : s.calib_idx) EXPECT_TRUE(all.insert(i).second) << "index in both sets";
    EXPECT_EQ(all.size(), n);
    EXPECT_EQ(*all.rbegin(), n - 1);
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, SplitPlanProperty, ::testing::Values(4, 10, 60, 101, 330));

TEST(SplitPlan, DeterministicPerSeedAndVariesAcrossSeeds) {
  const auto a = SplitPlan::draw(50, 0.75, 7);
  const auto b = SplitPlan::draw(50, 0.75, 7);
  const auto c = SplitPlan::draw(50, 0.75, 8);
  EXPECT_EQ(a.train_idx, b.train_idx);
  EXPECT_NE(a.train_idx, c.train_idx);
  EXPECT_NE(derive_seed(1, 10), derive_seed(1, 11));
  EXPECT_EQ(derive_seed(1, 10), derive_seed(1, 10));
}

TEST(IntervalForecast, CoversAndWidth) {
  IntervalForecast f;
  f.lower = 10;
  f.upper = 20;
  EXPECT_TRUE(f.covers(10));
  EXPECT_TRUE(f.covers(20));
  EXPECT_FALSE(f.covers(20.5));
  EXPECT_DOUBLE_EQ(f.width(), 10);
  f.unbounded = true;
  EXPECT_TRUE(f.covers(1e9));
}
