#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "confpi/backtest.hpp"
#include "confpi/conformal.hpp"
#include "confpi/errors.hpp"
#include "confpi/evaluate.hpp"
#include "confpi/ingest.hpp"
#include "confpi/lasso.hpp"
#include "confpi/qra.hpp"
#include "confpi/synthetic.hpp"
#include "confpi/yeo_johnson.hpp"

namespace py = pybind11;
using namespace confpi;

namespace {

std::vector<ModelSpec> parse_roster(const std::vector<std::string>& ids) {
  std::vector<ModelSpec> out;
  for (const auto& id : ids) out.push_back(ModelSpec::parse(id));
  return out;
}

BacktestConfig make_config(const std::string& market, int param_days, const std::vector<std::string>& models,
                           const std::vector<double>& alphas, std::uint64_t seed, bool percentile_grid, int threads) {
  BacktestConfig c;
  c.preset = MarketPreset::from_name(market);
  c.parameterization_days = param_days;
  if (!models.empty()) c.roster = parse_roster(models);
  c.alphas = alphas;
  c.base_seed = seed;
  c.percentile_grid = percentile_grid;
  c.threads = threads;
  return c;
}

// Column-oriented ledger, convenient for pandas.DataFrame(...).
py::dict ledger_columns(const RunLedger& ledger) {
  py::list date, hour, model, alpha, lower, upper, center, realized, hit;
  for (const auto& e : ledger.entries) {
    date.append(format_date(e.date));
    hour.append(e.forecast.hour + 1);
    model.append(e.forecast.model_tag);
    alpha.append(e.forecast.alpha);
    lower.append(e.forecast.lower);
    upper.append(e.forecast.upper);
    center.append(e.forecast.center);
    realized.append(e.realized);
    hit.append(e.hit);
  }
  py::dict d;
  d["date"] = date;
  d["hour"] = hour;
  d["model"] = model;
  d["alpha"] = alpha;
  d["lower"] = lower;
  d["upper"] = upper;
  d["center"] = center;
  d["realized"] = realized;
  d["hit"] = hit;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conformal prediction intervals for day-ahead electricity prices (C++ core).";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);

  py::class_<IntervalForecast>(m, "IntervalForecast")
      .def_readonly("alpha", &IntervalForecast::alpha)
      .def_readonly("lower", &IntervalForecast::lower)
      .def_readonly("upper", &IntervalForecast::upper)
      .def_readonly("center", &IntervalForecast::center)
      .def_readonly("unbounded", &IntervalForecast::unbounded)
      .def_readonly("crossed", &IntervalForecast::crossed)
      .def("covers", &IntervalForecast::covers)
      .def("width", &IntervalForecast::width)
      .def("__repr__", [](const IntervalForecast& f) {
        return "IntervalForecast(lower=" + std::to_string(f.lower) + ", upper=" + std::to_string(f.upper) + ")";
      });

  py::class_<HourlyPanel>(m, "HourlyPanel")
      .def_property_readonly("dates",
                             [](const HourlyPanel& p) {
                               std::vector<std::string> out;
                               for (const auto d : p.dates) out.push_back(format_date(d));
                               return out;
                             })
      .def_readonly("prices", &HourlyPanel::prices)
      .def_readonly("exog", &HourlyPanel::exog)
      .def_readonly("market_tag", &HourlyPanel::market_tag)
      .def("num_days", &HourlyPanel::num_days);

  m.def("load_panel",
        [](const std::string& path, const std::string& market, bool remove_outliers) {
          IngestOptions o;
          o.remove_outliers = remove_outliers;
          return load_panel(path, MarketPreset::from_name(market), o);
        },
        py::arg("path"), py::arg("market") = "nordpool", py::arg("remove_outliers") = false);

  m.def("synthetic_panel",
        [](std::size_t days, std::uint64_t seed, bool heteroscedastic, std::vector<std::string> fundamentals) {
          SyntheticOptions o;
          o.days = days;
          o.seed = seed;
          o.heteroscedastic = heteroscedastic;
          o.fundamentals = std::move(fundamentals);
          return synthetic_panel(o);
        },
        py::arg("days") = 100, py::arg("seed") = 1, py::arg("heteroscedastic") = false,
        py::arg("fundamentals") = std::vector<std::string>{});

  m.def("summary_stats", [](const HourlyPanel& p) {
    const auto s = summary_stats(p);
    py::dict d;
    d["count"] = s.count;
    d["mean"] = s.mean;
    d["sd"] = s.sd;
    d["q1"] = s.q1;
    d["q3"] = s.q3;
    d["min"] = s.min;
    d["max"] = s.max;
    return d;
  });

  m.def("yj_apply", &yj_apply, py::arg("eta"), py::arg("y"));
  m.def("yj_invert", &yj_invert, py::arg("eta"), py::arg("z"));
  m.def("yj_fit", [](const std::vector<double>& y) {
    const auto f = yj_fit(y);
    py::dict d;
    d["eta"] = f.params.eta;
    d["mu"] = f.params.mu;
    d["sigma2"] = f.params.sigma2;
    d["log_likelihood"] = f.log_likelihood;
    d["degenerate"] = f.degenerate;
    return d;
  });

  m.def("icp_threshold", [](const std::vector<double>& scores, double alpha) { return icp_threshold(scores, alpha); },
        py::arg("scores"), py::arg("alpha"));
  m.def("icp_interval", &icp_interval, py::arg("y_hat"), py::arg("threshold"), py::arg("alpha"));
  m.def("ncp_scores",
        [](const std::vector<double>& residuals, const std::vector<double>& estimates) {
          const auto s = ncp_scores(residuals, estimates);
          return py::make_tuple(s.scores, s.normalizer_floor);
        },
        py::arg("residuals"), py::arg("error_estimates"));
  m.def("ncp_interval", &ncp_interval, py::arg("y_hat"), py::arg("threshold"), py::arg("error_estimate"),
        py::arg("floor"), py::arg("alpha"));

  py::class_<LatticeVariant>(m, "LatticeVariant")
      .def(py::init([](bool s, bool p, bool n) { return LatticeVariant{s, p, n}; }), py::arg("symmetric"),
           py::arg("sampled"), py::arg("normalized"))
      .def_readonly("symmetric", &LatticeVariant::symmetric)
      .def_readonly("sampled", &LatticeVariant::sampled)
      .def_readonly("normalized", &LatticeVariant::normalized)
      .def_property_readonly("name", [](const LatticeVariant& v) { return std::string(v.name()); });
  m.def("lattice_node_names", [] {
    std::vector<std::string> out;
    for (const auto& v : LatticeVariant::all()) out.emplace_back(v.name());
    return out;
  });

  m.def("winkler", &winkler, py::arg("y"), py::arg("lower"), py::arg("upper"), py::arg("alpha"));
  m.def("pinball", &pinball, py::arg("q"), py::arg("y"), py::arg("tau"));
  m.def("coverage", [](const std::vector<std::uint8_t>& hits) { return coverage(hits); });
  m.def("christoffersen",
        [](const std::vector<std::uint8_t>& hits, double p) {
          const auto r = christoffersen(hits, p);
          py::dict d;
          d["lr_uc"] = r.lr_uc;
          d["lr_ind"] = r.lr_ind;
          d["lr_cc"] = r.lr_cc;
          d["p_uc"] = r.p_uc;
          d["p_ind"] = r.p_ind;
          d["p_cc"] = r.p_cc;
          d["degenerate"] = r.degenerate;
          return d;
        },
        py::arg("hits"), py::arg("p"));

  m.def("lasso_fit",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::optional<double> zeta) {
          const LassoModel lm = zeta ? lasso_fit_fixed(x, y, *zeta) : lasso_fit(x, y, lasso_default_grid());
          return py::make_tuple(lm.intercept, lm.coef, lm.zeta);
        },
        py::arg("x"), py::arg("y"), py::arg("zeta") = py::none(),
        "Returns (intercept, coef, zeta); zeta=None selects it by 2-fold CV.");

  m.def("qra_fit",
        [](const Eigen::MatrixXd& forecasts, const Eigen::VectorXd& y, double tau, bool intercept) {
          const QraModel q = qra_fit(forecasts, y, tau, intercept);
          return py::make_tuple(q.weights, q.intercept, q.objective);
        },
        py::arg("forecasts"), py::arg("y"), py::arg("tau"), py::arg("intercept") = true,
        "Returns (weights, intercept, objective).");

  m.def("run_backtest",
        [](const HourlyPanel& panel, const std::string& market, int param_days, const std::vector<std::string>& models,
           const std::vector<double>& alphas, std::uint64_t seed, bool percentile_grid, int threads) {
          const BacktestConfig c = make_config(market, param_days, models, alphas, seed, percentile_grid, threads);
          RunLedger ledger;
          {
            py::gil_scoped_release release;
            ledger = run_backtest(panel, c);
          }
          py::dict out = ledger_columns(ledger);
          out["gaps"] = ledger.gaps.size();
          out["warnings"] = ledger.warnings;
          return out;
        },
        py::arg("panel"), py::arg("market") = "nordpool", py::arg("param_days") = 330,
        py::arg("models") = std::vector<std::string>{}, py::arg("alphas") = std::vector<double>{0.5, 0.1},
        py::arg("seed") = 1, py::arg("percentile_grid") = false, py::arg("threads") = 0,
        "Rolling backtest; returns ledger columns plus 'gaps' and 'warnings'.");

  m.def("run_ablation",
        [](const HourlyPanel& panel, const std::string& market, int param_days, const std::vector<double>& alphas,
           std::uint64_t seed, int threads) {
          const BacktestConfig c = make_config(market, param_days, {}, alphas, seed, false, threads);
          AblationResult res;
          {
            py::gil_scoped_release release;
            res = run_ablation(panel, c);
          }
          py::list nodes;
          for (const auto& n : res.nodes) {
            py::dict d;
            d["forecaster"] = std::string(display_name(n.kind));
            d["node"] = std::string(n.variant.name());
            d["alpha"] = n.alpha;
            d["coverage"] = n.score.coverage;
            d["mean_width"] = n.score.mean_width;
            d["mean_winkler"] = n.score.mean_winkler;
            d["mean_pinball"] = n.score.mean_pinball;
            nodes.append(d);
          }
          py::list edges;
          for (const auto& e : res.edges) {
            py::dict d;
            d["forecaster"] = std::string(display_name(e.kind));
            d["alpha"] = e.alpha;
            d["extension"] = e.extension;
            d["from"] = std::string(e.from.name());
            d["to"] = std::string(e.to.name());
            d["d_winkler"] = e.d_winkler;
            d["se_winkler"] = e.se_winkler;
            d["d_pinball"] = e.d_pinball;
            d["d_width"] = e.d_width;
            edges.append(d);
          }
          return py::make_tuple(nodes, edges);
        },
        py::arg("panel"), py::arg("market") = "nordpool", py::arg("param_days") = 330,
        py::arg("alphas") = std::vector<double>{0.5, 0.1}, py::arg("seed") = 1, py::arg("threads") = 0,
        "Lattice ablation; returns (nodes, edges) as lists of dicts.");
}
