#include "confpi/backtest.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "confpi/csv.hpp"
#include "confpi/errors.hpp"
#include "confpi/features.hpp"
#include "confpi/pca.hpp"
#include "confpi/qra.hpp"
#include "confpi/stats.hpp"

namespace confpi {

// ---------------------------------------------------------------- roster

std::string ModelSpec::tag() const {
  if (method == IntervalMethod::qra) return "QRA";
  std::string out(display_name(kind));
  switch (method) {
    case IntervalMethod::empirical: return out + "_E";
    case IntervalMethod::icp: return out + "_ICP";
    case IntervalMethod::ncp: return out + "_NCP";
    case IntervalMethod::qra: break;
  }
  return out;
}

ModelSpec ModelSpec::parse(std::string_view id) {
  std::string s(id);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "qra") return {ForecasterKind::naive, IntervalMethod::qra};
  const auto us = s.rfind('_');
  if (us == std::string::npos) throw std::invalid_argument("unknown model id '" + std::string(id) + "'");
  const ForecasterKind kind = forecaster_kind_from_string(s.substr(0, us));
  const std::string m = s.substr(us + 1);
  IntervalMethod method;
  if (m == "e") {
    method = IntervalMethod::empirical;
  } else if (m == "icp") {
    method = IntervalMethod::icp;
  } else if (m == "ncp") {
    method = IntervalMethod::ncp;
  } else {
    throw std::invalid_argument("unknown interval method in '" + std::string(id) + "'");
  }
  if (kind == ForecasterKind::naive && method == IntervalMethod::ncp) {
    throw std::invalid_argument("naive has no error model; naive_ncp is not available");
  }
  return {kind, method};
}

std::vector<ModelSpec> ModelSpec::full_roster() {
  return {{ForecasterKind::naive, IntervalMethod::empirical}, {ForecasterKind::lasso, IntervalMethod::empirical},
          {ForecasterKind::lasso, IntervalMethod::ncp},       {ForecasterKind::knn, IntervalMethod::empirical},
          {ForecasterKind::knn, IntervalMethod::ncp},         {ForecasterKind::svr, IntervalMethod::empirical},
          {ForecasterKind::svr, IntervalMethod::ncp},         {ForecasterKind::naive, IntervalMethod::qra}};
}

std::vector<double> BacktestConfig::effective_alphas() const {
  std::vector<double> out = alphas;
  if (percentile_grid) {
    for (int i = 1; i <= 9; ++i) out.push_back(i / 10.0);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            out.end());
  return out;
}

void BacktestConfig::validate() const {
  CONFPI_REQUIRE(parameterization_days >= 60, "parameterization_days must be at least 60");
  CONFPI_REQUIRE(!roster.empty(), "model roster is empty");
  CONFPI_REQUIRE(!effective_alphas().empty(), "no alpha levels");
  for (const double a : effective_alphas()) CONFPI_REQUIRE(a > 0.0 && a < 1.0, "alpha must lie in (0,1)");
  CONFPI_REQUIRE(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction must lie in (0,1)");
  CONFPI_REQUIRE(qra_window_days >= 1 && qra_min_fit_rows >= 1, "QRA window settings must be positive");
  CONFPI_REQUIRE(!knn_k || *knn_k >= 1, "knn k must be positive");
}

std::string BacktestConfig::canonical() const {
  std::ostringstream os;
  os << "parameterization_days=" << parameterization_days << '\n';
  os << "models=";
  for (std::size_t i = 0; i < roster.size(); ++i) os << (i ? "," : "") << roster[i].tag();
  os << "\nalphas=";
  const auto a = effective_alphas();
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << format_number(a[i]);
  os << "\npercentile_grid=" << (percentile_grid ? 1 : 0) << '\n';
  os << "seed=" << base_seed << '\n';
  os << "market=" << preset.name << '\n';
  os << "knn_k=" << (knn_k ? *knn_k : preset.knn_k) << '\n';
  os << "train_fraction=" << format_number(train_fraction) << '\n';
  os << "qra_window_days=" << qra_window_days << '\n';
  os << "qra_min_fit_rows=" << qra_min_fit_rows << '\n';
  return os.str();
}

std::uint64_t BacktestConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::size_t forecast_day_count(std::size_t panel_days, int parameterization_days) {
  const std::size_t need = static_cast<std::size_t>(parameterization_days) + kFeatureWarmupDays;
  return panel_days > need ? panel_days - need : 0;
}

// ---------------------------------------------------------------- engine

namespace {

constexpr std::array<ForecasterKind, 4> kAllKinds = {ForecasterKind::naive, ForecasterKind::lasso,
                                                     ForecasterKind::knn, ForecasterKind::svr};

// Forecasters whose point forecasts form the QRA regressors (naive is left out).
constexpr std::array<ForecasterKind, 3> kQraKinds = {ForecasterKind::lasso, ForecasterKind::knn, ForecasterKind::svr};

std::size_t kind_index(ForecasterKind k) { return static_cast<std::size_t>(k); }

bool is_qra_input(ForecasterKind k) { return k != ForecasterKind::naive; }

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

ForecasterSpec spec_for(ForecasterKind kind, const BacktestConfig& config, Eigen::Index rows) {
  ForecasterSpec spec;
  spec.kind = kind;
  const int k = config.knn_k ? *config.knn_k : config.preset.knn_k;
  spec.knn_k = static_cast<int>(std::min<Eigen::Index>(k, rows));
  return spec;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Model fitted on every row of the window.
struct FullFit {
  double center = 0.0;
  std::vector<double> residuals;
  std::vector<double> error_estimates;
  double query_error_estimate = 1.0;
  std::vector<std::string> warnings;
};

FullFit fit_full(const ForecasterSpec& spec, const DesignMatrix& dm, const Eigen::VectorXd& query,
                 bool want_residuals, bool want_error_model) {
  FullFit out;
  const FittedModel model = fit_forecaster(spec, dm.x, dm.y);
  out.center = model.predict(query);
  out.warnings = model.warnings();
  if (!want_residuals && !want_error_model) return out;
  const Eigen::VectorXd res = dm.y - model.predict(dm.x);
  out.residuals = to_std(res);
  if (want_error_model) {
    const FittedModel err = fit_error_model(spec, dm.x, res.cwiseAbs(), model.transform());
    out.error_estimates = to_std(err.predict(dm.x));
    out.query_error_estimate = err.predict(query);
    out.warnings.insert(out.warnings.end(), err.warnings().begin(), err.warnings().end());
  }
  return out;
}

// Model fitted on the training split and scored on the calibration split.
struct SplitFit {
  double center = 0.0;
  std::vector<double> calib_residuals;
  std::vector<double> calib_error_estimates;
  double query_error_estimate = 1.0;
  std::vector<std::string> warnings;
};

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& y, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(idx[i]));
  return out;
}

SplitFit fit_split(ForecasterKind kind, const BacktestConfig& config, const DesignMatrix& dm,
                   const Eigen::VectorXd& query, const SplitPlan& split, bool want_error_model) {
  SplitFit out;
  const Eigen::MatrixXd xt = take_rows(dm.x, split.train_idx);
  const Eigen::VectorXd yt = take(dm.y, split.train_idx);
  const Eigen::MatrixXd xc = take_rows(dm.x, split.calib_idx);
  const Eigen::VectorXd yc = take(dm.y, split.calib_idx);
  const ForecasterSpec spec = spec_for(kind, config, xt.rows());
  const FittedModel model = fit_forecaster(spec, xt, yt);
  out.center = model.predict(query);
  out.calib_residuals = to_std(yc - model.predict(xc));
  out.warnings = model.warnings();
  if (want_error_model) {
    const Eigen::VectorXd train_abs = (yt - model.predict(xt)).cwiseAbs();
    const FittedModel err = fit_error_model(spec, xt, train_abs, model.transform());
    out.calib_error_estimates = to_std(err.predict(xc));
    out.query_error_estimate = err.predict(query);
    out.warnings.insert(out.warnings.end(), err.warnings().begin(), err.warnings().end());
  }
  return out;
}

struct WindowData {
  DesignMatrix dm;
  Eigen::VectorXd query;
  double realized = 0.0;
  std::size_t latest_input_day = 0;
};

WindowData prepare_window(const HourlyPanel& panel, const PcaModel& pca, std::size_t t, int h, std::size_t row_first,
                          const MarketPreset& preset) {
  WindowData w;
  w.dm = build_matrix(panel, pca, h, row_first, t, preset);
  w.query = build_row(panel, pca, t, h, preset).to_vector();
  w.realized = panel.price(t, h);
  // Rows are target days < t; the query row and PCA read prices up to t - 1.
  w.latest_input_day = t - 1;
  if (!w.dm.days.empty()) w.latest_input_day = std::max(w.latest_input_day, w.dm.days.back());
  return w;
}

LedgerEntry make_entry(IntervalForecast f, const std::string& tag, std::size_t day, int hour, Date date,
                       double realized, std::size_t latest, std::optional<ForecasterKind> point,
                       std::optional<ForecasterKind> error) {
  f.day = day;
  f.hour = hour;
  f.model_tag = tag;
  LedgerEntry e;
  e.forecast = std::move(f);
  e.date = date;
  e.realized = realized;
  e.hit = e.forecast.covers(realized);
  e.latest_input_day = latest;
  e.point_kind = point;
  e.error_kind = error;
  return e;
}

struct TaskResult {
  std::array<std::optional<double>, 4> point;  // full-window forecast per kind
  std::vector<std::vector<LedgerEntry>> by_model;
  std::vector<Gap> gaps;
  std::vector<std::string> warnings;
};

void collect_warnings(const std::vector<TaskResult>& results, RunLedger& ledger) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : results) {
    for (const auto& w : r.warnings) ++counts[w];
  }
  for (const auto& [w, c] : counts) ledger.warnings.push_back(w + " (" + std::to_string(c) + "x)");
}

std::vector<PcaModel> fit_pcas(const HourlyPanel& panel, std::size_t from, int p, int threads,
                               std::vector<std::string>& errors) {
  const std::size_t n = panel.num_days();
  std::vector<PcaModel> pcas(n);
  errors.assign(n, {});
  parallel_for(n - from, threads, [&](std::size_t i) {
    const std::size_t t = from + i;
    const std::size_t lo = t > static_cast<std::size_t>(p) + 1 ? t - static_cast<std::size_t>(p) - 1 : 0;
    try {
      pcas[t] = pca_fit(panel, lo, t);
    } catch (const std::exception& ex) {
      errors[t] = ex.what();
    }
  });
  return pcas;
}

}  // namespace

RunLedger run_backtest(const HourlyPanel& panel, const BacktestConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = panel.num_days();
  const auto p = static_cast<std::size_t>(config.parameterization_days);
  CONFPI_REQUIRE(n >= p + kFeatureWarmupDays + 1, "panel shorter than parameterization window + warm-up + 1 day");
  const std::size_t first = p + kFeatureWarmupDays;
  const auto alphas = config.effective_alphas();
  const auto& roster = config.roster;

  std::array<bool, 4> need_full{}, need_split{}, need_error{};
  bool has_qra = false;
  for (const auto& m : roster) {
    const auto k = kind_index(m.kind);
    switch (m.method) {
      case IntervalMethod::empirical: need_full[k] = true; break;
      case IntervalMethod::icp: need_split[k] = true; break;
      case IntervalMethod::ncp: need_split[k] = need_error[k] = true; break;
      case IntervalMethod::qra: has_qra = true; break;
    }
  }
  const auto min_rows = static_cast<std::size_t>(config.qra_min_fit_rows);
  const auto qra_window = static_cast<std::size_t>(config.qra_window_days);
  std::size_t cache_first = first;
  if (has_qra) {
    cache_first = std::max(kFeatureWarmupDays + min_rows, first > qra_window ? first - qra_window : 0);
    cache_first = std::min(cache_first, first);
  }

  std::vector<std::string> pca_errors;
  const auto pcas = fit_pcas(panel, cache_first, config.parameterization_days, config.threads, pca_errors);

  const std::size_t days = n - cache_first;
  std::vector<TaskResult> results(days * kHoursPerDay);
  for (auto& r : results) r.by_model.resize(roster.size());

  // Stage 1: point forecasts (and the QRA input cache) plus every non-QRA interval.
  parallel_for(results.size(), config.threads, [&](std::size_t task) {
    const std::size_t t = cache_first + task / kHoursPerDay;
    const int h = static_cast<int>(task % kHoursPerDay);
    TaskResult& out = results[task];
    const bool forecast_day = t >= first;
    auto gap_all = [&](const std::string& reason) {
      if (!forecast_day) return;
      for (const auto& m : roster) out.gaps.push_back({t, h, m.tag(), reason});
    };
    if (!pca_errors[t].empty()) return gap_all("pca: " + pca_errors[t]);
    const std::size_t row_first = std::max(kFeatureWarmupDays, t > p ? t - p : 0);
    WindowData w;
    try {
      w = prepare_window(panel, pcas[t], t, h, row_first, config.preset);
    } catch (const std::exception& ex) {
      return gap_all(std::string("features: ") + ex.what());
    }
    const Date date = panel.dates[t];

    std::array<std::optional<FullFit>, 4> full;
    std::array<std::string, 4> full_error;
    for (const auto kind : kAllKinds) {
      const auto k = kind_index(kind);
      const bool want = (forecast_day && need_full[k]) || (has_qra && is_qra_input(kind));
      if (!want) continue;
      try {
        full[k] = fit_full(spec_for(kind, config, w.dm.x.rows()), w.dm, w.query, forecast_day && need_full[k], false);
        out.point[k] = full[k]->center;
        for (const auto& s : full[k]->warnings) out.warnings.push_back(std::string(display_name(kind)) + ": " + s);
      } catch (const std::exception& ex) {
        full_error[k] = ex.what();
      }
    }
    if (!forecast_day) return;

    std::optional<SplitPlan> split;
    std::array<std::optional<SplitFit>, 4> splits;
    std::array<std::string, 4> split_error;
    for (const auto kind : kAllKinds) {
      const auto k = kind_index(kind);
      if (!need_split[k]) continue;
      if (!split) split = SplitPlan::draw(static_cast<std::size_t>(w.dm.x.rows()), config.train_fraction,
                                          derive_seed(config.base_seed, t));
      try {
        splits[k] = fit_split(kind, config, w.dm, w.query, *split, need_error[k]);
        for (const auto& s : splits[k]->warnings) out.warnings.push_back(std::string(display_name(kind)) + ": " + s);
      } catch (const std::exception& ex) {
        split_error[k] = ex.what();
      }
    }

    for (std::size_t mi = 0; mi < roster.size(); ++mi) {
      const ModelSpec& m = roster[mi];
      if (m.method == IntervalMethod::qra) continue;
      const auto k = kind_index(m.kind);
      const std::string tag = m.tag();
      try {
        for (const double a : alphas) {
          IntervalForecast f;
          std::optional<ForecasterKind> error_kind;
          if (m.method == IntervalMethod::empirical) {
            if (!full[k]) throw std::runtime_error(full_error[k]);
            std::vector<double> abs_res(full[k]->residuals.size());
            std::transform(full[k]->residuals.begin(), full[k]->residuals.end(), abs_res.begin(),
                           [](double r) { return std::abs(r); });
            f = empirical_interval(abs_res, a, full[k]->center);
          } else {
            if (!splits[k]) throw std::runtime_error(split_error[k]);
            const SplitFit& s = *splits[k];
            if (m.method == IntervalMethod::icp) {
              std::vector<double> abs_res(s.calib_residuals.size());
              std::transform(s.calib_residuals.begin(), s.calib_residuals.end(), abs_res.begin(),
                             [](double r) { return std::abs(r); });
              f = icp_interval(s.center, icp_threshold(abs_res, a), a);
            } else {
              const NonConformitySet set = ncp_scores(s.calib_residuals, s.calib_error_estimates);
              f = ncp_interval(s.center, icp_threshold(set.scores, a), s.query_error_estimate, set.normalizer_floor, a);
              error_kind = m.kind;
            }
          }
          out.by_model[mi].push_back(
              make_entry(std::move(f), tag, t, h, date, w.realized, w.latest_input_day, m.kind, error_kind));
        }
      } catch (const std::exception& ex) {
        out.by_model[mi].clear();
        out.gaps.push_back({t, h, tag, ex.what()});
      }
    }
  });

  // Stage 2: QRA on the cached out-of-sample point forecasts of the trailing window.
  if (has_qra) {
    const std::size_t qra_index = static_cast<std::size_t>(
        std::find_if(roster.begin(), roster.end(), [](const ModelSpec& m) { return m.method == IntervalMethod::qra; }) -
        roster.begin());
    const std::size_t forecast_tasks = (n - first) * kHoursPerDay;
    parallel_for(forecast_tasks, config.threads, [&](std::size_t i) {
      const std::size_t d = first + i / kHoursPerDay;
      const int h = static_cast<int>(i % kHoursPerDay);
      TaskResult& out = results[(d - cache_first) * kHoursPerDay + static_cast<std::size_t>(h)];
      auto complete = [&](std::size_t t) {
        const auto& pt = results[(t - cache_first) * kHoursPerDay + static_cast<std::size_t>(h)].point;
        return std::all_of(kQraKinds.begin(), kQraKinds.end(), [&](ForecasterKind k) { return pt[kind_index(k)].has_value(); });
      };
      const std::size_t lo = std::max(cache_first, d > qra_window ? d - qra_window : 0);
      std::vector<std::size_t> train_days;
      for (std::size_t t = lo; t < d; ++t) {
        if (complete(t)) train_days.push_back(t);
      }
      const std::size_t cols = kQraKinds.size();
      try {
        if (!complete(d)) throw std::runtime_error("point forecast missing for the target day");
        if (train_days.size() < 10 * (cols + 1)) {
          throw std::runtime_error("only " + std::to_string(train_days.size()) + " QRA training days");
        }
        Eigen::MatrixXd x(static_cast<Eigen::Index>(train_days.size()), static_cast<Eigen::Index>(cols));
        Eigen::VectorXd y(x.rows());
        for (std::size_t r = 0; r < train_days.size(); ++r) {
          const auto& pt = results[(train_days[r] - cache_first) * kHoursPerDay + static_cast<std::size_t>(h)].point;
          for (std::size_t c = 0; c < cols; ++c) {
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *pt[kind_index(kQraKinds[c])];
          }
          y(static_cast<Eigen::Index>(r)) = panel.price(train_days[r], h);
        }
        Eigen::VectorXd query(static_cast<Eigen::Index>(cols));
        for (std::size_t c = 0; c < cols; ++c) query(static_cast<Eigen::Index>(c)) = *out.point[kind_index(kQraKinds[c])];
        for (const double a : alphas) {
          const QraModel lower = qra_fit(x, y, a / 2.0);
          const QraModel upper = qra_fit(x, y, 1.0 - a / 2.0);
          if (lower.non_unique || upper.non_unique) out.warnings.emplace_back("QRA: non-unique quantile regression optimum");
          IntervalForecast f = qra_interval(lower, upper, query);
          if (f.crossed) out.warnings.emplace_back("QRA: crossed quantiles swapped");
          out.by_model[qra_index].push_back(make_entry(std::move(f), "QRA", d, h, panel.dates[d], panel.price(d, h),
                                                       d - 1, std::nullopt, std::nullopt));
        }
      } catch (const std::exception& ex) {
        out.by_model[qra_index].clear();
        out.gaps.push_back({d, h, "QRA", ex.what()});
      }
    });
  }

  RunLedger ledger;
  ledger.market = config.preset.name;
  ledger.config_hash = config.hash();
  ledger.seed = config.base_seed;
  ledger.first_forecast_day = first;
  ledger.forecast_days = n - first;
  for (std::size_t task = (first - cache_first) * kHoursPerDay; task < results.size(); ++task) {
    for (auto& model_entries : results[task].by_model) {
      for (auto& e : model_entries) ledger.entries.push_back(std::move(e));
    }
  }
  for (auto& r : results) {
    for (auto& g : r.gaps) ledger.gaps.push_back(std::move(g));
  }
  std::stable_sort(ledger.gaps.begin(), ledger.gaps.end(),
                   [](const Gap& a, const Gap& b) { return std::tie(a.day, a.hour) < std::tie(b.day, b.hour); });
  collect_warnings(results, ledger);
  ledger.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return ledger;
}

std::vector<std::size_t> audit_look_ahead(const RunLedger& ledger) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < ledger.entries.size(); ++i) {
    if (ledger.entries[i].latest_input_day >= ledger.entries[i].forecast.day) bad.push_back(i);
  }
  return bad;
}

// ---------------------------------------------------------------- scoring

namespace {

bool same_alpha(double a, double b) { return std::abs(a - b) < 1e-9; }

}  // namespace

ScoreTable score_ledger(const RunLedger& ledger) {
  ScoreTable table;
  // Group indices by (model, alpha), preserving first-appearance order.
  std::vector<std::pair<std::string, double>> order;
  std::map<std::pair<std::string, double>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < ledger.entries.size(); ++i) {
    const auto& f = ledger.entries[i].forecast;
    const auto key = std::make_pair(f.model_tag, f.alpha);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(i);
  }
  for (const auto& key : order) {
    const auto& idx = groups[key];
    for (int h = -1; h < kHoursPerDay; ++h) {
      std::vector<IntervalForecast> fs;
      std::vector<double> ys;
      for (const auto i : idx) {
        const auto& e = ledger.entries[i];
        if (h >= 0 && e.forecast.hour != h) continue;
        fs.push_back(e.forecast);
        ys.push_back(e.realized);
      }
      if (fs.empty()) continue;
      ScoreRow row = score_intervals(fs, ys);
      row.model = key.first;
      row.market = ledger.market;
      row.hour = h;
      table.rows.push_back(std::move(row));
    }
  }

  // Percentile deviations for models that carry alpha 0.1 .. 0.9.
  std::vector<std::string> models;
  for (const auto& key : order) {
    if (std::find(models.begin(), models.end(), key.first) == models.end()) models.push_back(key.first);
  }
  for (const auto& model : models) {
    std::map<int, std::map<std::pair<std::size_t, int>, double>> by_percentile;
    std::map<std::pair<std::size_t, int>, double> realized;
    bool complete = true;
    for (const int pct : percentile_grid()) {
      const double a = pct < 50 ? 2.0 * pct / 100.0 : 2.0 * (1.0 - pct / 100.0);
      bool found = false;
      for (const auto& key : order) {
        if (key.first != model || !same_alpha(key.second, a)) continue;
        found = true;
        for (const auto i : groups[key]) {
          const auto& e = ledger.entries[i];
          by_percentile[pct][{e.forecast.day, e.forecast.hour}] = pct < 50 ? e.forecast.lower : e.forecast.upper;
          realized[{e.forecast.day, e.forecast.hour}] = e.realized;
        }
      }
      complete = complete && found;
    }
    if (!complete || realized.empty()) continue;
    std::map<int, std::vector<double>> quantiles;
    std::vector<double> ys;
    for (const auto& [k, y] : realized) {
      bool all = true;
      for (auto& [pct, m] : by_percentile) all = all && m.count(k) > 0;
      if (!all) continue;
      ys.push_back(y);
      for (auto& [pct, m] : by_percentile) quantiles[pct].push_back(m[k]);
    }
    if (!ys.empty()) table.deviations[model] = coverage_deviation_curve(quantiles, ys);
  }
  return table;
}

std::vector<ChristoffersenRow> christoffersen_table(const RunLedger& ledger) {
  std::vector<std::pair<std::string, double>> order;
  std::map<std::pair<std::string, double>, std::array<HitSeries, kHoursPerDay>> series;
  for (const auto& e : ledger.entries) {
    const auto key = std::make_pair(e.forecast.model_tag, e.forecast.alpha);
    auto [it, inserted] = series.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second[static_cast<std::size_t>(e.forecast.hour)].push_back(e.hit ? 1 : 0);
  }
  std::vector<ChristoffersenRow> out;
  for (const auto& key : order) {
    for (int h = 0; h < kHoursPerDay; ++h) {
      const auto& hits = series[key][static_cast<std::size_t>(h)];
      if (hits.size() < 30) continue;
      out.push_back({key.first, h, key.second, christoffersen(hits, 1.0 - key.second)});
    }
  }
  return out;
}

// ---------------------------------------------------------------- ablation

AblationResult run_ablation(const HourlyPanel& panel, const BacktestConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = panel.num_days();
  const auto p = static_cast<std::size_t>(config.parameterization_days);
  CONFPI_REQUIRE(n >= p + kFeatureWarmupDays + 1, "panel shorter than parameterization window + warm-up + 1 day");
  const std::size_t first = p + kFeatureWarmupDays;
  const auto alphas = config.effective_alphas();
  constexpr std::array<ForecasterKind, 3> kinds = {ForecasterKind::lasso, ForecasterKind::knn, ForecasterKind::svr};
  const auto variants = LatticeVariant::all();

  std::vector<std::string> pca_errors;
  const auto pcas = fit_pcas(panel, first, config.parameterization_days, config.threads, pca_errors);

  std::vector<TaskResult> results((n - first) * kHoursPerDay);
  parallel_for(results.size(), config.threads, [&](std::size_t task) {
    const std::size_t t = first + task / kHoursPerDay;
    const int h = static_cast<int>(task % kHoursPerDay);
    TaskResult& out = results[task];
    out.by_model.resize(kinds.size());
    auto node_tag = [](ForecasterKind k, const LatticeVariant& v) {
      return std::string(display_name(k)) + "|" + std::string(v.name());
    };
    try {
      if (!pca_errors[t].empty()) throw std::runtime_error("pca: " + pca_errors[t]);
      const WindowData w = prepare_window(panel, pcas[t], t, h, t - p, config.preset);
      const SplitPlan split = SplitPlan::draw(static_cast<std::size_t>(w.dm.x.rows()), config.train_fraction,
                                              derive_seed(config.base_seed, t));
      for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
        const ForecasterKind kind = kinds[ki];
        try {
          const FullFit full = fit_full(spec_for(kind, config, w.dm.x.rows()), w.dm, w.query, true, true);
          const SplitFit sf = fit_split(kind, config, w.dm, w.query, split, true);
          LatticeContext ctx;
          ctx.full_center = full.center;
          ctx.full_residuals = full.residuals;
          ctx.full_error_estimates = full.error_estimates;
          ctx.full_query_error_estimate = full.query_error_estimate;
          ctx.split_center = sf.center;
          ctx.calib_residuals = sf.calib_residuals;
          ctx.calib_error_estimates = sf.calib_error_estimates;
          ctx.split_query_error_estimate = sf.query_error_estimate;
          for (const auto& v : variants) {
            for (const double a : alphas) {
              out.by_model[ki].push_back(make_entry(lattice_interval(v, ctx, a), node_tag(kind, v), t, h,
                                                    panel.dates[t], w.realized, w.latest_input_day, kind,
                                                    v.normalized ? std::optional(kind) : std::nullopt));
            }
          }
        } catch (const std::exception& ex) {
          out.by_model[ki].clear();
          out.gaps.push_back({t, h, std::string(display_name(kind)), ex.what()});
        }
      }
    } catch (const std::exception& ex) {
      for (const auto kind : kinds) out.gaps.push_back({t, h, std::string(display_name(kind)), ex.what()});
    }
  });

  AblationResult res;
  RunLedger& ledger = res.ledger;
  ledger.market = config.preset.name;
  ledger.config_hash = config.hash();
  ledger.seed = config.base_seed;
  ledger.first_forecast_day = first;
  ledger.forecast_days = n - first;
  for (auto& r : results) {
    for (auto& es : r.by_model) {
      for (auto& e : es) ledger.entries.push_back(std::move(e));
    }
    for (auto& g : r.gaps) ledger.gaps.push_back(std::move(g));
  }
  collect_warnings(results, ledger);

  // Index ledger rows by (forecaster, variant, alpha) -> (day, hour) -> entry.
  using PointKey = std::pair<std::size_t, int>;
  std::map<std::tuple<std::size_t, int, std::size_t>, std::map<PointKey, const LedgerEntry*>> cells;
  auto alpha_index = [&](double a) {
    return static_cast<std::size_t>(std::find_if(alphas.begin(), alphas.end(),
                                                 [&](double b) { return same_alpha(a, b); }) -
                                    alphas.begin());
  };
  auto variant_index = [&](const LatticeVariant& v) {
    return (v.symmetric ? 4 : 0) + (v.sampled ? 2 : 0) + (v.normalized ? 1 : 0);
  };
  for (const auto& e : ledger.entries) {
    const auto bar = e.forecast.model_tag.find('|');
    const ForecasterKind kind = forecaster_kind_from_string(e.forecast.model_tag.substr(0, bar));
    const std::string node = e.forecast.model_tag.substr(bar + 1);
    int vi = 0;
    for (; vi < 8; ++vi) {
      if (variants[static_cast<std::size_t>(vi)].name() == node) break;
    }
    cells[{kind_index(kind), vi, alpha_index(e.forecast.alpha)}][{e.forecast.day, e.forecast.hour}] = &e;
  }

  for (const auto kind : kinds) {
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      for (const auto& v : variants) {
        AblationNode node{v, kind, alphas[ai], {}};
        const auto& m = cells[{kind_index(kind), variant_index(v), ai}];
        std::vector<IntervalForecast> fs;
        std::vector<double> ys;
        for (const auto& [k, e] : m) {
          fs.push_back(e->forecast);
          ys.push_back(e->realized);
        }
        if (!fs.empty()) node.score = score_intervals(fs, ys);
        node.score.model = std::string(display_name(kind)) + "|" + std::string(v.name());
        node.score.market = ledger.market;
        node.score.alpha = alphas[ai];
        res.nodes.push_back(std::move(node));
      }
      static const std::array<const char*, 3> names = {"symmetry", "sampling", "normalization"};
      for (int bit = 0; bit < 3; ++bit) {
        for (const auto& from : variants) {
          const bool on = bit == 0 ? from.symmetric : bit == 1 ? from.sampled : from.normalized;
          if (on) continue;
          LatticeVariant to = from;
          (bit == 0 ? to.symmetric : bit == 1 ? to.sampled : to.normalized) = true;
          AblationEdge edge{kind, alphas[ai], from, to, names[static_cast<std::size_t>(bit)]};
          const auto& mf = cells[{kind_index(kind), variant_index(from), ai}];
          const auto& mt = cells[{kind_index(kind), variant_index(to), ai}];
          std::vector<double> dw;
          double dp = 0.0, dwidth = 0.0;
          for (const auto& [k, ef] : mf) {
            const auto it = mt.find(k);
            if (it == mt.end() || ef->forecast.unbounded || it->second->forecast.unbounded) continue;
            const auto& a = ef->forecast;
            const auto& b = it->second->forecast;
            dw.push_back(winkler(it->second->realized, b.lower, b.upper, b.alpha) -
                         winkler(ef->realized, a.lower, a.upper, a.alpha));
            dp += interval_pinball(b, it->second->realized) - interval_pinball(a, ef->realized);
            dwidth += b.width() - a.width();
          }
          if (!dw.empty()) {
            const double cnt = static_cast<double>(dw.size());
            edge.d_winkler = mean(dw);
            edge.d_pinball = dp / cnt;
            edge.d_width = dwidth / cnt;
            edge.se_winkler = sample_sd(dw) / std::sqrt(cnt);
          } else {
            edge.d_winkler = edge.d_pinball = edge.d_width = edge.se_winkler =
                std::numeric_limits<double>::quiet_NaN();
          }
          res.edges.push_back(std::move(edge));
        }
      }
    }
  }
  ledger.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return res;
}

}  // namespace confpi
