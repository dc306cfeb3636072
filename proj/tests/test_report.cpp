#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "confpi/errors.hpp"
#include "confpi/ingest.hpp"
#include "confpi/report.hpp"
#include "confpi/synthetic.hpp"
#include "helpers.hpp"

using namespace confpi;

namespace {

// A hand-built ledger: 40 days x 24 hours of one model at the given alphas.
RunLedger handmade_ledger(const std::vector<double>& alphas, bool always_miss = false) {
  RunLedger l;
  l.market = "nordpool";
  const Date d0 = parse_date("2014-01-01");
  for (std::size_t d = 0; d < 40; ++d) {
    for (int h = 0; h < 24; ++h) {
      for (const double a : alphas) {
        LedgerEntry e;
        e.date = d0 + std::chrono::days(static_cast<long>(d));
        e.forecast.day = d;
        e.forecast.hour = h;
        e.forecast.alpha = a;
        e.forecast.model_tag = "Lasso_NCP";
        e.forecast.center = 30 + h;
        e.forecast.lower = e.forecast.center - 10 * (1 - a);
        e.forecast.upper = e.forecast.center + 10 * (1 - a);
        e.realized = always_miss ? 1000.0 : 30.0 + h + ((d * 7 + static_cast<std::size_t>(h)) % 19) - 9.0;
        e.hit = e.forecast.covers(e.realized);
        e.latest_input_day = d > 0 ? d - 1 : 0;
        l.entries.push_back(e);
      }
    }
  }
  return l;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(LedgerCsv, RoundTripsEveryField) {
  auto l = handmade_ledger({0.5, 0.1});
  l.entries[3].forecast.lower = -std::numeric_limits<double>::infinity();
  l.entries[3].forecast.upper = std::numeric_limits<double>::infinity();
  l.entries[3].forecast.unbounded = true;
  l.entries[3].hit = true;
  l.entries[7].forecast.lower = 1.0 / 3.0;
  std::ostringstream os;
  write_ledger_csv(os, l);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "date,hour,model,alpha,lower,upper,center,realized,hit");
  std::istringstream in(os.str());
  const auto back = read_ledger_csv(in, "nordpool");
  ASSERT_EQ(back.entries.size(), l.entries.size());
  for (std::size_t i = 0; i < l.entries.size(); ++i) {
    const auto& a = l.entries[i];
    const auto& b = back.entries[i];
    EXPECT_EQ(a.date, b.date);
    EXPECT_EQ(a.forecast.day, b.forecast.day);
    EXPECT_EQ(a.forecast.hour, b.forecast.hour);
    EXPECT_EQ(a.forecast.model_tag, b.forecast.model_tag);
    EXPECT_EQ(a.forecast.alpha, b.forecast.alpha);
    EXPECT_EQ(a.forecast.lower, b.forecast.lower);
    EXPECT_EQ(a.forecast.upper, b.forecast.upper);
    EXPECT_EQ(a.forecast.unbounded, b.forecast.unbounded);
    EXPECT_EQ(a.realized, b.realized);
    EXPECT_EQ(a.hit, b.hit);
  }
  std::ostringstream again;
  write_ledger_csv(again, back);
  EXPECT_EQ(again.str(), os.str());
}

TEST(LedgerCsv, RejectsBrokenFiles) {
  std::istringstream missing("date,hour,model\n2014-01-01,1,X\n");
  EXPECT_THROW(read_ledger_csv(missing), SchemaError);
  std::istringstream bad_hour(
      "date,hour,model,alpha,lower,upper,center,realized,hit\n2014-01-01,25,X,0.1,0,1,0.5,0.5,1\n");
  EXPECT_THROW(read_ledger_csv(bad_hour), SchemaError);
}

TEST(PanelCsv, SyntheticPanelRoundTripsThroughIngest) {
  SyntheticOptions o;
  o.days = 20;
  o.fundamentals = {"load", "wind"};
  const auto p = synthetic_panel(o);
  std::ostringstream os;
  write_panel_csv(os, p);
  std::istringstream in(os.str());
  const auto q = load_panel(in, MarketPreset::epex());
  ASSERT_EQ(q.num_days(), 20u);
  EXPECT_TRUE(q.prices.isApprox(p.prices, 1e-12));
  EXPECT_TRUE(q.exog.at("wind").isApprox(p.exog.at("wind"), 1e-12));
}

TEST(PlotData, LrHourlyCapsAtTwenty) {
  const auto l = handmade_ledger({0.1}, true);
  // Every forecast misses: LR_uc = -2 * 40 * log(0.1) ~ 184 before the cap.
  const auto table = christoffersen_table(l);
  ASSERT_FALSE(table.empty());
  EXPECT_GT(table.front().result.lr_uc, 35);
  std::ostringstream os;
  write_plotdata(os, l, PlotKind::lr_hourly);
  const auto rows = csv_rows(os.str());
  ASSERT_EQ(rows.size(), 25u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"model", "market", "alpha", "hour", "lr_uc", "lr_ind", "lr_cc"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stod(rows[i][4]), 20.0);
    EXPECT_LE(std::stod(rows[i][6]), 20.0);
  }
}

TEST(PlotData, WinklerHourlyHas24RowsPerModel) {
  const auto l = handmade_ledger({0.1});
  std::ostringstream os;
  write_plotdata(os, l, PlotKind::winkler_hourly);
  const auto rows = csv_rows(os.str());
  ASSERT_EQ(rows.size(), 25u);
  std::set<std::string> hours;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][0], "Lasso_NCP");
    EXPECT_EQ(rows[i][1], "nordpool");
    hours.insert(rows[i][3]);
  }
  EXPECT_EQ(hours.size(), 24u);
}

TEST(PlotData, PinballPercentileGrid) {
  std::vector<double> alphas;
  for (int i = 1; i <= 9; ++i) alphas.push_back(i / 10.0);
  const auto l = handmade_ledger(alphas);
  std::ostringstream os;
  write_plotdata(os, l, PlotKind::pinball_percentile);
  const auto rows = csv_rows(os.str());
  std::vector<int> pct;
  for (std::size_t i = 1; i < rows.size(); ++i) pct.push_back(std::stoi(rows[i][2]));
  EXPECT_EQ(pct, percentile_grid());

  std::ostringstream dev;
  write_plotdata(dev, l, PlotKind::coverage_dev);
  const auto drows = csv_rows(dev.str());
  ASSERT_EQ(drows.size(), 20u);
  EXPECT_EQ(drows[10][2], "50");
  EXPECT_EQ(drows[10][4], "1");
  EXPECT_THROW(plot_kind_from_string("histogram"), std::invalid_argument);
}

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Manifest, StableJsonWithSortedKeys) {
  RunManifest m;
  m.command = "backtest";
  m.config = "x";
  m.seed = 7;
  m.output_digests = {{"scores.csv", "bb"}, {"ledger.csv", "aa"}};
  const auto a = manifest_json(m);
  EXPECT_EQ(a, manifest_json(m));
  EXPECT_LT(a.find("\"command\""), a.find("\"seed\""));
  EXPECT_LT(a.find("ledger.csv"), a.find("scores.csv"));
}
