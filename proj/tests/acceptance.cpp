// Acceptance suite: one PASS/FAIL/SKIP line per criterion, with its runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "confpi/backtest.hpp"
#include "confpi/conformal.hpp"
#include "confpi/evaluate.hpp"
#include "confpi/ingest.hpp"
#include "confpi/lasso.hpp"
#include "confpi/qra.hpp"
#include "confpi/report.hpp"
#include "confpi/synthetic.hpp"
#include "oracles.hpp"

using namespace confpi;

namespace {

struct Outcome {
  enum Status { pass, fail, skip } status = fail;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome icp_marginal_validity() {
  // y = 2 + 3x + N(0,1); OLS on 100 training rows, 250 calibration rows, one test point per draw.
  std::mt19937_64 rng(20240101);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> ux(-2, 2);
  const int draws = 5000, n_train = 100, n_cal = 250;
  int hits = 0;
  for (int d = 0; d < draws; ++d) {
    Eigen::MatrixXd x(n_train, 1);
    Eigen::VectorXd y(n_train);
    for (int i = 0; i < n_train; ++i) {
      x(i, 0) = ux(rng);
      y(i) = 2 + 3 * x(i, 0) + g(rng);
    }
    const Eigen::VectorXd b = oracle::ols_with_intercept(x, y);
    std::vector<double> scores(n_cal);
    for (auto& s : scores) {
      const double xi = ux(rng);
      s = std::abs(2 + 3 * xi + g(rng) - (b(0) + b(1) * xi));
    }
    const double xt = ux(rng);
    const double yt = 2 + 3 * xt + g(rng);
    hits += icp_interval(b(0) + b(1) * xt, icp_threshold(scores, 0.1), 0.1).covers(yt);
  }
  const double cov = static_cast<double>(hits) / draws;
  const double lo = 0.90 - 0.012, hi = 0.90 + 1.0 / 251 + 0.012;
  return verdict(cov >= lo && cov <= hi, fmt("coverage %.4f in [%.4f, %.4f]", cov, lo, hi));
}

Outcome toy_threshold() {
  const double lam = icp_threshold(std::vector<double>{1, 2, 3, 4}, 0.3);
  return verdict(lam == 4.0, fmt("lambda = %g (expected 4)", lam));
}

Outcome ncp_adaptivity() {
  // y = x + N(0, 0.1 x); point model y_hat = x and error model E|eps| = 0.1 x sqrt(2/pi).
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(1, 10);
  std::normal_distribution<double> g;
  const double k = 0.1 * std::sqrt(2 / M_PI);
  const int n_cal = 250;
  std::vector<double> xs, ncp_w, icp_w;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> res(n_cal), est(n_cal);
    for (int i = 0; i < n_cal; ++i) {
      const double x = ux(rng);
      res[static_cast<std::size_t>(i)] = 0.1 * x * g(rng);
      est[static_cast<std::size_t>(i)] = k * x;
    }
    std::vector<double> abs_res(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) abs_res[i] = std::abs(res[i]);
    const auto set = ncp_scores(res, est);
    const double x = ux(rng);
    xs.push_back(x);
    ncp_w.push_back(ncp_interval(x, icp_threshold(set.scores, 0.1), k * x, set.normalizer_floor, 0.1).width());
    icp_w.push_back(icp_interval(x, icp_threshold(abs_res, 0.1), 0.1).width());
  }
  const double rn = oracle::spearman(ncp_w, xs), ri = oracle::spearman(icp_w, xs);
  return verdict(rn > 0.8 && std::abs(ri) < 0.1, fmt("rho(NCP width, x) = %.3f, rho(ICP width, x) = %.3f", rn, ri));
}

Outcome ncp_icp_reduction() {
  std::mt19937_64 rng(78);
  std::normal_distribution<double> g(0, 5);
  std::uniform_int_distribution<int> n(20, 300);
  std::uniform_real_distribution<double> ua(0.02, 0.6);
  double worst = 0;
  for (int c = 0; c < 100; ++c) {
    std::vector<double> res(static_cast<std::size_t>(n(rng)));
    for (auto& r : res) r = g(rng);
    const std::vector<double> est(res.size(), 7.0);
    std::vector<double> abs_res(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) abs_res[i] = std::abs(res[i]);
    const double a = ua(rng), y_hat = 50 + g(rng);
    const auto set = ncp_scores(res, est);
    const auto f = ncp_interval(y_hat, icp_threshold(set.scores, a), 7.0, set.normalizer_floor, a);
    const auto i = icp_interval(y_hat, icp_threshold(abs_res, a), a);
    if (f.unbounded != i.unbounded) return verdict(false, "unbounded flags differ");
    if (!f.unbounded) worst = std::max({worst, std::abs(f.lower - i.lower), std::abs(f.upper - i.upper)});
  }
  return verdict(worst <= 1e-9, fmt("max |NCP - ICP| bound difference = %.2e", worst));
}

Outcome lasso_oracle() {
  std::mt19937_64 rng(79);
  std::normal_distribution<double> g;
  const int n = 50, p = 8;
  Eigen::MatrixXd a(n, p + 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= p; ++j) a(i, j) = g(rng);
  a.col(0).setOnes();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p + 1);
  const Eigen::MatrixXd x = q.rightCols(p);  // orthonormal, centred
  Eigen::VectorXd beta(p);
  beta << 3, -2, 1.5, 0.8, -0.4, 0.2, 0.05, 0;
  Eigen::VectorXd y = Eigen::VectorXd::Constant(n, 10.0) + x * beta;
  for (int i = 0; i < n; ++i) y(i) += 0.1 * g(rng);

  LassoOptions o;
  o.tolerance = 1e-12;
  const Eigen::VectorXd s = lasso_penalty_scales(x, true);
  double worst = 0;
  for (const double zeta : {0.5, 2.0, 8.0, 20.0, 40.0}) {
    const auto m = lasso_fit_fixed(x, y, zeta, o);
    for (int j = 0; j < p; ++j) {
      const double z = x.col(j).dot(y), t = zeta * s(j) / 2;
      const double ref = z > t ? z - t : (z < -t ? z + t : 0.0);
      worst = std::max(worst, std::abs(m.coef(j) - ref));
    }
  }
  const auto m0 = lasso_fit_fixed(x, y, 0.0, o);
  const Eigen::VectorXd ols = oracle::ols_with_intercept(x, y);
  double worst0 = std::abs(m0.intercept - ols(0));
  for (int j = 0; j < p; ++j) worst0 = std::max(worst0, std::abs(m0.coef(j) - ols(j + 1)));
  return verdict(worst <= 1e-6 && worst0 <= 1e-6,
                 fmt("max soft-threshold gap %.2e, max OLS gap at zeta=0 %.2e", worst, worst0));
}

Outcome qra_oracle() {
  std::mt19937_64 rng(80);
  std::normal_distribution<double> g;
  double worst = 0;
  for (int inst = 0; inst < 10; ++inst) {
    Eigen::MatrixXd f(200, 3);
    Eigen::VectorXd y(200);
    for (int i = 0; i < 200; ++i) {
      const double s = 40 + 8 * g(rng);
      y(i) = s + 2 * g(rng);
      f(i, 0) = s + g(rng);
      f(i, 1) = 0.9 * s + 3 + 2 * g(rng);
      f(i, 2) = s + 3 * g(rng);
    }
    Eigen::MatrixXd a(200, 4);
    a.leftCols(3) = f;
    a.col(3).setOnes();
    for (const double tau : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      const double lp = qra_fit(f, y, tau).objective;
      const double ver = oracle::quantile_regression_verifier(a, y, tau, 40000);
      worst = std::max(worst, std::abs(lp - ver) / ver);
    }
  }
  std::vector<double> v(101);
  for (auto& x : v) x = std::exp(g(rng));
  const Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(v.data(), 101);
  const double med = qra_fit(Eigen::MatrixXd(101, 0), y, 0.5).intercept;
  std::nth_element(v.begin(), v.begin() + 50, v.end());
  return verdict(worst <= 1e-6 && med == v[50],
                 fmt("max relative objective gap %.2e; median fit ", worst) + (med == v[50] ? "exact" : "WRONG"));
}

Outcome metric_arithmetic() {
  double err = 0;
  err = std::max(err, std::abs(winkler(15, 10, 20, 0.1) - 10));
  err = std::max(err, std::abs(winkler(8, 10, 20, 0.1) - 50));
  err = std::max(err, std::abs(winkler(25, 10, 20, 0.5) - 30));
  err = std::max(err, std::abs(pinball(50, 60, 0.95) - 9.5));
  err = std::max(err, std::abs(pinball(50, 50, 0.95) - 0));
  err = std::max(err, std::abs(pinball(50, 40, 0.95) - 0.5));
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(-100, 100), ua(0.001, 0.999);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    double l = u(rng), r = u(rng);
    if (l > r) std::swap(l, r);
    if (winkler(u(rng), l, r, ua(rng)) < r - l) ++violations;
  }
  return verdict(err <= 1e-12 && violations == 0,
                 fmt("max unit-case error %.1e; Winkler < width in %g of 10000 cases", err, violations));
}

Outcome christoffersen_calibration() {
  int rejections = 0;
  for (int seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed) + 1000);
    std::bernoulli_distribution b(0.9);
    std::vector<std::uint8_t> h(10000);
    for (auto& x : h) x = b(rng);
    if (christoffersen(h, 0.9).lr_uc > oracle::kChi2_95_df1) ++rejections;
  }
  std::vector<std::uint8_t> alt(1000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2;
  const double lr_ind = christoffersen(alt, 0.9).lr_ind;
  const double rate = rejections / 200.0;
  return verdict(rate <= 0.08 && lr_ind > 100,
                 fmt("LR_uc > 3.84 in %.1f%% of seeds; alternating LR_ind = %.1f", 100 * rate, lr_ind));
}

Outcome lattice_identities() {
  SyntheticOptions so;
  so.days = 128;
  so.seed = 9;
  const auto panel = synthetic_panel(so);
  BacktestConfig c;
  c.parameterization_days = 60;
  c.base_seed = 4;
  c.roster.clear();
  for (const char* id : {"lasso_icp", "lasso_e", "knn_icp", "knn_e", "svm_icp", "svm_e"})
    c.roster.push_back(ModelSpec::parse(id));
  const auto ref = run_backtest(panel, c);
  const auto abl = run_ablation(panel, c);
  std::map<std::tuple<std::size_t, int, std::string, double>, const IntervalForecast*> by_key;
  for (const auto& e : ref.entries)
    by_key[{e.forecast.day, e.forecast.hour, e.forecast.model_tag, e.forecast.alpha}] = &e.forecast;
  std::size_t compared = 0, mismatched = 0;
  for (const auto& e : abl.ledger.entries) {
    const auto bar = e.forecast.model_tag.find('|');
    const std::string node = e.forecast.model_tag.substr(bar + 1);
    std::string suffix;
    if (node == "Conformal Prediction") suffix = "_ICP";
    if (node == "quantiles - symmetric") suffix = "_E";
    if (suffix.empty()) continue;
    const auto it = by_key.find({e.forecast.day, e.forecast.hour, e.forecast.model_tag.substr(0, bar) + suffix,
                                 e.forecast.alpha});
    ++compared;
    if (it == by_key.end() || it->second->lower != e.forecast.lower || it->second->upper != e.forecast.upper)
      ++mismatched;
  }
  const std::size_t expected = 60u * 24 * 3 * 2 * 2;
  return verdict(ref.forecast_days == 60 && compared == expected && mismatched == 0,
                 fmt("%g forecast days, %g node forecasts compared, %g mismatches",
                     static_cast<double>(ref.forecast_days), static_cast<double>(compared),
                     static_cast<double>(mismatched)));
}

Outcome end_to_end_determinism() {
  SyntheticOptions so;
  so.days = 100;
  so.seed = 10;
  const auto panel = synthetic_panel(so);
  BacktestConfig c;
  c.parameterization_days = 60;
  c.base_seed = 1;
  auto render = [&] {
    const auto ledger = run_backtest(panel, c);
    std::ostringstream os;
    write_ledger_csv(os, ledger);
    write_scores_csv(os, score_ledger(ledger));
    write_christoffersen_csv(os, christoffersen_table(ledger));
    return std::make_pair(os.str(), ledger.entries.size());
  };
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = render();
  const double first = seconds_since(t0);
  const auto b = render();
  const bool same = a.first == b.first;
  return verdict(same && first < 600 && a.second == 32u * 24 * 8 * 2,
                 fmt("%g forecasts, one run %.1f s, byte-identical: ", static_cast<double>(a.second), first) +
                     (same ? "yes" : "no"));
}

Outcome real_data_smoke() {
  const char* path = std::getenv("CONFPI_NORDPOOL_CSV");
  if (path == nullptr || *path == '\0') return {Outcome::skip, "set CONFPI_NORDPOOL_CSV to run"};
  const auto panel = load_panel(std::string(path), MarketPreset::nordpool());
  const auto s = summary_stats(panel);
  auto close = [](double got, double want) { return std::abs(got - want) <= 0.005 * std::abs(want); };
  const bool stats_ok = close(s.mean, 36.38) && close(s.sd, 8.64) && close(s.q1, 32.55) && close(s.q3, 39.90) &&
                        close(s.min, 1.38) && close(s.max, 138.76);
  BacktestConfig c;
  c.preset = MarketPreset::nordpool();
  const auto ledger = run_backtest(panel, c);
  const auto table = score_ledger(ledger);
  double best_winkler = INFINITY, best_cov = 0;
  std::string best;
  for (const auto& r : table.rows) {
    if (r.hour != -1 || std::abs(r.alpha - 0.1) > 1e-12 || r.model.find("_NCP") == std::string::npos) continue;
    if (r.mean_winkler < best_winkler) {
      best_winkler = r.mean_winkler;
      best_cov = r.coverage;
      best = r.model;
    }
  }
  const bool cov_ok = best_cov >= 0.85 && best_cov <= 0.95;
  return verdict(stats_ok && cov_ok, fmt("mean %.2f sd %.2f q1 %.2f", s.mean, s.sd, s.q1) +
                                         fmt(" q3 %.2f min %.2f max %.2f; ", s.q3, s.min, s.max) + best +
                                         fmt(" 90%% coverage %.3f", best_cov));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 ICP marginal validity", icp_marginal_validity},
      {"2 four-score toy threshold", toy_threshold},
      {"3 NCP adaptivity", ncp_adaptivity},
      {"4 NCP/ICP reduction identity", ncp_icp_reduction},
      {"5 Lasso oracle equivalence", lasso_oracle},
      {"6 QRA oracle equivalence", qra_oracle},
      {"7 metric arithmetic", metric_arithmetic},
      {"8 Christoffersen calibration", christoffersen_calibration},
      {"9 ablation-lattice identities", lattice_identities},
      {"10 end-to-end determinism and scale", end_to_end_determinism},
      {"11 real-data smoke", real_data_smoke},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {Outcome::fail, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    const char* tag = o.status == Outcome::pass ? "PASS" : (o.status == Outcome::skip ? "SKIP" : "FAIL");
    if (o.status == Outcome::fail) ++failures;
    std::printf("%s [%s] %s (%.3f s)\n", tag, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
