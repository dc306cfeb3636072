// confpi command-line tool: validate, backtest, ablate, plotdata, synth.
//
// Exit codes: 0 ok, 2 usage or schema error, 3 validation failure,
// 4 fatal error inside a module.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "confpi/backtest.hpp"
#include "confpi/csv.hpp"
#include "confpi/errors.hpp"
#include "confpi/ingest.hpp"
#include "confpi/report.hpp"
#include "confpi/synthetic.hpp"

#ifndef CONFPI_VERSION
#define CONFPI_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace confpi;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitFatal = 4;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Appends `--key value` for every config-file key not already given as a flag.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  const auto items = CLI::ConfigINI().from_config(in);
  for (const auto& item : items) {
    const std::string flag = "--" + item.name;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given || item.inputs.empty()) continue;
    const std::string& v = item.inputs.front();
    if (v == "true" || v == "on" || v == "yes") {
      args.push_back(flag);
    } else if (v != "false" && v != "off" && v != "no") {
      std::string joined;
      for (std::size_t i = 0; i < item.inputs.size(); ++i) joined += (i ? "," : "") + item.inputs[i];
      args.push_back(flag);
      args.push_back(joined);
    }
  }
  return args;
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("CPP_SEED"); env != nullptr && *env != '\0') {
    return std::stoull(env);
  }
  return flag_seed;
}

void write_file(const fs::path& path, const std::string& content, std::map<std::string, std::string>& digests) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  digests[path.filename().string()] = sha256_hex(content);
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

HourlyPanel load_input(const std::string& input, const MarketPreset& preset, bool remove_outliers) {
  IngestOptions opts;
  opts.remove_outliers = remove_outliers;
  IngestReport report;
  HourlyPanel panel = load_panel(input, preset, opts, &report);
  std::cerr << "read " << report.rows_read << " rows, " << panel.num_days() << " days; imputed "
            << report.cells_imputed << " cells, averaged " << report.duplicate_hours_averaged << " duplicate hours\n";
  return panel;
}

struct CommonOptions {
  std::string input;
  std::string market = "nordpool";
  std::string out = ".";
  std::uint64_t seed = 1;
  int param_days = 0;
  std::string alpha = "0.5,0.1";
  int threads = 0;
  int knn_k = 0;
  bool remove_outliers = false;
  bool percentile_grid = false;
  std::string config;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--input", o.input, "Hourly price CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--market", o.market, "Market preset")->check(CLI::IsMember({"nordpool", "gefcom", "epex"}));
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Base seed (CPP_SEED overrides)");
  cmd->add_option("--param-days", o.param_days, "Parameterization window in days (default: market preset)");
  cmd->add_option("--alpha", o.alpha, "Comma-separated miscoverage levels");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--knn-k", o.knn_k, "Override the preset's KNN neighbour count");
  cmd->add_flag("--remove-outliers", o.remove_outliers, "Replace Tukey outliers before fitting");
  cmd->add_flag("--percentile-grid", o.percentile_grid, "Also forecast alpha 0.1..0.9 (percentiles 5..95)");
  cmd->add_option("--config", o.config, "Flat key=value file with defaults for these flags");
}

BacktestConfig make_config(const CommonOptions& o) {
  BacktestConfig c;
  c.preset = MarketPreset::from_name(o.market);
  c.parameterization_days = o.param_days > 0 ? o.param_days : c.preset.parameterization_days;
  c.alphas.clear();
  for (const auto& a : split_list(o.alpha)) {
    const auto v = parse_number(a);
    if (!v) throw CLI::ValidationError("--alpha", "not a number: " + a);
    c.alphas.push_back(*v);
  }
  c.percentile_grid = o.percentile_grid;
  c.base_seed = effective_seed(o.seed);
  c.threads = o.threads;
  if (o.knn_k > 0) c.knn_k = o.knn_k;
  return c;
}

void report_run(const RunLedger& ledger) {
  std::cerr << ledger.entries.size() << " interval forecasts over " << ledger.forecast_days << " days in "
            << ledger.wall_clock_seconds << " s; " << ledger.gaps.size() << " gaps\n";
  for (const auto& w : ledger.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_validate(const CommonOptions& o) {
  const auto preset = MarketPreset::from_name(o.market);
  const HourlyPanel panel = load_input(o.input, preset, o.remove_outliers);
  const auto s = summary_stats(panel);
  std::cout << "days," << panel.num_days() << "\n";
  std::cout << "first_date," << format_date(panel.dates.front()) << "\n";
  std::cout << "last_date," << format_date(panel.dates.back()) << "\n";
  std::cout << "count," << s.count << "\nmean," << format_number(s.mean) << "\nsd," << format_number(s.sd)
            << "\nq1," << format_number(s.q1) << "\nq3," << format_number(s.q3) << "\nmin," << format_number(s.min)
            << "\nmax," << format_number(s.max) << "\n";
  const auto outliers = tukey_outliers(panel);
  std::cout << "outliers," << outliers.flags.size() << "\n";
  for (const auto& f : outliers.flags) {
    std::cout << "outlier," << format_date(panel.dates[f.day]) << "," << f.hour + 1 << "," << format_number(f.value)
              << "\n";
  }
  const auto violations = validate_panel(panel);
  for (const auto& v : violations) std::cerr << "invalid: " << v.message << '\n';
  return violations.empty() ? 0 : kExitValidation;
}

RunManifest base_manifest(const std::string& command, const BacktestConfig& c, const std::string& input) {
  RunManifest m;
  m.command = command;
  m.config = c.canonical();
  m.config_hash = c.hash();
  m.seed = c.base_seed;
  m.version = CONFPI_VERSION;
  m.input_digests[fs::path(input).filename().string()] = sha256_file(input);
  return m;
}

int cmd_backtest(const CommonOptions& o, const std::string& models) {
  BacktestConfig c = make_config(o);
  c.roster.clear();
  for (const auto& id : split_list(models)) {
    try {
      c.roster.push_back(ModelSpec::parse(id));
    } catch (const std::invalid_argument& ex) {
      throw CLI::ValidationError("--models", ex.what());
    }
  }
  const HourlyPanel panel = load_input(o.input, c.preset, o.remove_outliers);
  const RunLedger ledger = run_backtest(panel, c);
  report_run(ledger);
  if (const auto bad = audit_look_ahead(ledger); !bad.empty()) {
    throw std::runtime_error("look-ahead audit failed for " + std::to_string(bad.size()) + " entries");
  }
  fs::create_directories(o.out);
  RunManifest m = base_manifest("backtest", c, o.input);
  const ScoreTable scores = score_ledger(ledger);
  write_file(fs::path(o.out) / "ledger.csv", render([&](auto& os) { write_ledger_csv(os, ledger); }), m.output_digests);
  write_file(fs::path(o.out) / "scores.csv", render([&](auto& os) { write_scores_csv(os, scores); }), m.output_digests);
  write_file(fs::path(o.out) / "coverage_deviation.csv", render([&](auto& os) { write_deviation_csv(os, scores); }),
             m.output_digests);
  write_file(fs::path(o.out) / "christoffersen.csv",
             render([&](auto& os) { write_christoffersen_csv(os, christoffersen_table(ledger)); }), m.output_digests);
  write_file(fs::path(o.out) / "gaps.csv", render([&](auto& os) { write_gaps_csv(os, ledger, panel.dates); }),
             m.output_digests);
  m.entries = ledger.entries.size();
  m.gaps = ledger.gaps.size();
  m.warnings = ledger.warnings;
  std::ofstream(fs::path(o.out) / "manifest.json", std::ios::binary) << manifest_json(m);
  return 0;
}

int cmd_ablate(const CommonOptions& o) {
  const BacktestConfig c = make_config(o);
  const HourlyPanel panel = load_input(o.input, c.preset, o.remove_outliers);
  const AblationResult res = run_ablation(panel, c);
  report_run(res.ledger);
  fs::create_directories(o.out);
  RunManifest m = base_manifest("ablate", c, o.input);
  write_file(fs::path(o.out) / "ablation_nodes.csv", render([&](auto& os) { write_ablation_nodes_csv(os, res); }),
             m.output_digests);
  write_file(fs::path(o.out) / "ablation_edges.csv", render([&](auto& os) { write_ablation_edges_csv(os, res); }),
             m.output_digests);
  write_file(fs::path(o.out) / "ablation_ledger.csv", render([&](auto& os) { write_ledger_csv(os, res.ledger); }),
             m.output_digests);
  write_file(fs::path(o.out) / "gaps.csv", render([&](auto& os) { write_gaps_csv(os, res.ledger, panel.dates); }),
             m.output_digests);
  m.entries = res.ledger.entries.size();
  m.gaps = res.ledger.gaps.size();
  m.warnings = res.ledger.warnings;
  std::ofstream(fs::path(o.out) / "manifest.json", std::ios::binary) << manifest_json(m);
  return 0;
}

// Market tag from a manifest.json next to the ledger, if there is one.
std::string market_from_manifest(const fs::path& ledger_path) {
  std::ifstream in(ledger_path.parent_path() / "manifest.json");
  if (!in) return "unknown";
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto pos = text.find("market=");
  if (pos == std::string::npos) return "unknown";
  const auto end = text.find_first_of("\\\n\"", pos);
  return text.substr(pos + 7, end - pos - 7);
}

int cmd_plotdata(const std::string& ledger_path, const std::string& kind_name, std::string market,
                 const std::string& out_path) {
  PlotKind kind;
  try {
    kind = plot_kind_from_string(kind_name);
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitUsage;
  }
  if (market.empty()) market = market_from_manifest(ledger_path);
  std::ifstream in(ledger_path);
  if (!in) throw SchemaError("cannot open ledger '" + ledger_path + "'");
  const RunLedger ledger = read_ledger_csv(in, market);
  if (out_path.empty() || out_path == "-") {
    write_plotdata(std::cout, ledger, kind);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    write_plotdata(out, ledger, kind);
  }
  return 0;
}

int cmd_synth(const SyntheticOptions& s, const std::string& out_path) {
  const HourlyPanel panel = synthetic_panel(s);
  if (out_path.empty() || out_path == "-") {
    write_panel_csv(std::cout, panel);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    write_panel_csv(out, panel);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal prediction intervals for day-ahead electricity prices"};
  app.set_version_flag("--version", CONFPI_VERSION);
  app.require_subcommand(1);

  CommonOptions validate_opts;
  auto* validate = app.add_subcommand("validate", "Load, validate and summarize a price file");
  validate->add_option("--input", validate_opts.input, "Hourly price CSV")->required()->check(CLI::ExistingFile);
  validate->add_option("--market", validate_opts.market, "Market preset")
      ->check(CLI::IsMember({"nordpool", "gefcom", "epex"}));
  validate->add_flag("--remove-outliers", validate_opts.remove_outliers, "Replace Tukey outliers");

  CommonOptions backtest_opts;
  std::string models = "naive_e,lasso_e,lasso_ncp,knn_e,knn_ncp,svm_e,svm_ncp,qra";
  auto* backtest = app.add_subcommand("backtest", "Rolling-window backtest of the model roster");
  add_common(backtest, backtest_opts);
  backtest->add_option("--models", models, "Comma-separated roster, e.g. naive_e,lasso_ncp,qra");

  CommonOptions ablate_opts;
  auto* ablate = app.add_subcommand("ablate", "Symmetry / sampling / normalization lattice");
  add_common(ablate, ablate_opts);

  std::string ledger_path, kind, plot_market, plot_out;
  auto* plot = app.add_subcommand("plotdata", "Long-format plot tables from a ledger");
  plot->add_option("--ledger", ledger_path, "ledger.csv from a backtest")->required()->check(CLI::ExistingFile);
  plot->add_option("--kind", kind, "winkler_hourly|pinball_percentile|coverage_dev|lr_hourly")->required();
  plot->add_option("--market", plot_market, "Market tag (default: from manifest.json)");
  plot->add_option("--out", plot_out, "Output file (default: stdout)");

  SyntheticOptions synth_opts;
  std::string synth_out, synth_market = "nordpool";
  auto* synth = app.add_subcommand("synth", "Write a synthetic hourly price panel");
  synth->add_option("--days", synth_opts.days, "Number of days");
  synth->add_option("--seed", synth_opts.seed, "Generator seed");
  synth->add_option("--start", synth_opts.start_date, "First date (YYYY-MM-DD)");
  synth->add_option("--market", synth_market, "Adds the preset's fundamental columns")
      ->check(CLI::IsMember({"nordpool", "gefcom", "epex"}));
  synth->add_flag("--heteroscedastic", synth_opts.heteroscedastic, "Hour-dependent noise scale");
  synth->add_option("--out", synth_out, "Output CSV (default: stdout)");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_opts);
    if (*backtest) return cmd_backtest(backtest_opts, models);
    if (*ablate) return cmd_ablate(ablate_opts);
    if (*plot) return cmd_plotdata(ledger_path, kind, plot_market, plot_out);
    if (*synth) {
      synth_opts.fundamentals = MarketPreset::from_name(synth_market).fundamentals;
      return cmd_synth(synth_opts, synth_out);
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return kExitFatal;
  }
  return 0;
}
