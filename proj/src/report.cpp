#include "confpi/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "confpi/csv.hpp"
#include "confpi/errors.hpp"

namespace confpi {
namespace {

std::string hour_text(int h) { return h < 0 ? "all" : std::to_string(h + 1); }

const char* kind_tag(ForecasterKind k) {
  switch (k) {
    case ForecasterKind::naive: return "Naive";
    case ForecasterKind::lasso: return "Lasso";
    case ForecasterKind::knn: return "KNN";
    case ForecasterKind::svr: return "SVM";
  }
  return "?";
}

std::string bits(const LatticeVariant& v) {
  return std::string("(") + (v.symmetric ? "T" : "F") + "," + (v.sampled ? "T" : "F") + "," +
         (v.normalized ? "T" : "F") + ")";
}

struct SeriesKey {
  std::string model;
  double alpha;
  friend bool operator<(const SeriesKey& a, const SeriesKey& b) {
    return std::tie(a.model, a.alpha) < std::tie(b.model, b.alpha);
  }
};

// Ledger entries grouped by (model, alpha), keeping first-appearance order.
std::vector<std::pair<SeriesKey, std::vector<const LedgerEntry*>>> group_series(const RunLedger& ledger) {
  std::vector<std::pair<SeriesKey, std::vector<const LedgerEntry*>>> out;
  std::map<SeriesKey, std::size_t> where;
  for (const auto& e : ledger.entries) {
    SeriesKey key{e.forecast.model_tag, e.forecast.alpha};
    auto [it, inserted] = where.try_emplace(key, out.size());
    if (inserted) out.push_back({key, {}});
    out[it->second].second.push_back(&e);
  }
  return out;
}

}  // namespace

void write_ledger_csv(std::ostream& out, const RunLedger& ledger) {
  out << "date,hour,model,alpha,lower,upper,center,realized,hit\n";
  for (const auto& e : ledger.entries) {
    const auto& f = e.forecast;
    out << format_date(e.date) << ',' << f.hour + 1 << ',' << f.model_tag << ',' << format_number(f.alpha) << ','
        << format_number(f.lower) << ',' << format_number(f.upper) << ',' << format_number(f.center) << ','
        << format_number(e.realized) << ',' << (e.hit ? 1 : 0) << '\n';
  }
}

RunLedger read_ledger_csv(std::istream& in, const std::string& market) {
  const CsvTable table = parse_csv(in);
  static const char* kCols[] = {"date", "hour", "model", "alpha", "lower", "upper", "center", "realized", "hit"};
  std::vector<std::size_t> col;
  for (const char* name : kCols) {
    const auto c = table.column(name);
    if (!c) throw SchemaError(std::string("ledger: missing column '") + name + "'");
    col.push_back(*c);
  }
  RunLedger ledger;
  ledger.market = market;
  std::optional<Date> first;
  std::vector<Date> dates;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = " at line " + std::to_string(table.line_numbers[r]);
    LedgerEntry e;
    try {
      e.date = parse_date(row[col[0]]);
    } catch (const std::exception&) {
      throw SchemaError("ledger: bad date" + where);
    }
    auto num = [&](std::size_t c, const char* what) {
      const auto v = parse_number(row[col[c]]);
      if (!v) throw SchemaError(std::string("ledger: bad ") + what + where);
      return *v;
    };
    const double hour = num(1, "hour");
    if (hour < 1 || hour > kHoursPerDay || hour != std::floor(hour)) throw SchemaError("ledger: hour out of range" + where);
    e.forecast.hour = static_cast<int>(hour) - 1;
    e.forecast.model_tag = row[col[2]];
    e.forecast.alpha = num(3, "alpha");
    e.forecast.lower = num(4, "lower");
    e.forecast.upper = num(5, "upper");
    e.forecast.center = num(6, "center");
    e.forecast.unbounded = std::isinf(e.forecast.lower) || std::isinf(e.forecast.upper);
    e.realized = num(7, "realized");
    e.hit = num(8, "hit") != 0.0;
    if (!first || e.date < *first) first = e.date;
    ledger.entries.push_back(std::move(e));
  }
  for (auto& e : ledger.entries) {
    e.forecast.day = static_cast<std::size_t>((e.date - *first).count());
    e.latest_input_day = e.forecast.day > 0 ? e.forecast.day - 1 : 0;
  }
  return ledger;
}

void write_scores_csv(std::ostream& out, const ScoreTable& table) {
  out << "model,market,hour,alpha,n,coverage,mean_width,mean_winkler,mean_pinball,unbounded\n";
  for (const auto& r : table.rows) {
    out << r.model << ',' << r.market << ',' << hour_text(r.hour) << ',' << format_number(r.alpha) << ',' << r.n
        << ',' << format_number(r.coverage) << ',' << format_number(r.mean_width) << ','
        << format_number(r.mean_winkler) << ',' << format_number(r.mean_pinball) << ',' << r.unbounded << '\n';
  }
}

void write_deviation_csv(std::ostream& out, const ScoreTable& table) {
  out << "model,percentile,deviation,interpolated\n";
  for (const auto& [model, devs] : table.deviations) {
    for (const auto& d : devs) {
      out << model << ',' << d.percentile << ',' << format_number(d.deviation) << ',' << (d.interpolated ? 1 : 0)
          << '\n';
    }
  }
}

void write_christoffersen_csv(std::ostream& out, const std::vector<ChristoffersenRow>& rows) {
  out << "model,hour,alpha,n,hits,lr_uc,p_uc,lr_ind,p_ind,lr_cc,p_cc,degenerate\n";
  for (const auto& r : rows) {
    const auto& c = r.result;
    out << r.model << ',' << r.hour + 1 << ',' << format_number(r.alpha) << ',' << c.n << ',' << c.n1 << ','
        << format_number(c.lr_uc) << ',' << format_number(c.p_uc) << ',' << format_number(c.lr_ind) << ','
        << format_number(c.p_ind) << ',' << format_number(c.lr_cc) << ',' << format_number(c.p_cc) << ','
        << (c.degenerate ? 1 : 0) << '\n';
  }
}

void write_ablation_nodes_csv(std::ostream& out, const AblationResult& result) {
  out << "forecaster,node,symmetric,sampled,normalized,alpha,n,coverage,mean_width,mean_winkler,mean_pinball,"
         "unbounded\n";
  for (const auto& node : result.nodes) {
    const auto& s = node.score;
    out << kind_tag(node.kind) << ',' << node.variant.name() << ',' << (node.variant.symmetric ? 1 : 0) << ','
        << (node.variant.sampled ? 1 : 0) << ',' << (node.variant.normalized ? 1 : 0) << ','
        << format_number(node.alpha) << ',' << s.n << ',' << format_number(s.coverage) << ','
        << format_number(s.mean_width) << ',' << format_number(s.mean_winkler) << ','
        << format_number(s.mean_pinball) << ',' << s.unbounded << '\n';
  }
}

void write_ablation_edges_csv(std::ostream& out, const AblationResult& result) {
  out << "forecaster,alpha,extension,from,to,from_bits,to_bits,d_winkler,se_winkler,d_pinball,d_width\n";
  for (const auto& e : result.edges) {
    out << kind_tag(e.kind) << ',' << format_number(e.alpha) << ',' << e.extension << ',' << e.from.name() << ','
        << e.to.name() << ',' << bits(e.from) << ',' << bits(e.to) << ',' << format_number(e.d_winkler) << ','
        << format_number(e.se_winkler) << ',' << format_number(e.d_pinball) << ',' << format_number(e.d_width)
        << '\n';
  }
}

void write_gaps_csv(std::ostream& out, const RunLedger& ledger, const std::vector<Date>& dates) {
  out << "date,hour,model,reason\n";
  for (const auto& g : ledger.gaps) {
    std::string reason = g.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    const std::string date = g.day < dates.size() ? format_date(dates[g.day]) : std::to_string(g.day);
    out << date << ',' << g.hour + 1 << ',' << g.model << ',' << reason << '\n';
  }
}

PlotKind plot_kind_from_string(std::string_view name) {
  if (name == "winkler_hourly") return PlotKind::winkler_hourly;
  if (name == "pinball_percentile") return PlotKind::pinball_percentile;
  if (name == "coverage_dev") return PlotKind::coverage_dev;
  if (name == "lr_hourly") return PlotKind::lr_hourly;
  throw std::invalid_argument("unknown plot kind '" + std::string(name) + "'");
}

void write_plotdata(std::ostream& out, const RunLedger& ledger, PlotKind kind) {
  const auto series = group_series(ledger);
  switch (kind) {
    case PlotKind::winkler_hourly: {
      out << "model,market,alpha,hour,winkler\n";
      for (const auto& [key, entries] : series) {
        for (int h = 0; h < kHoursPerDay; ++h) {
          std::vector<IntervalForecast> fs;
          std::vector<double> ys;
          for (const auto* e : entries) {
            if (e->forecast.hour != h) continue;
            fs.push_back(e->forecast);
            ys.push_back(e->realized);
          }
          const double w = fs.empty() ? std::numeric_limits<double>::quiet_NaN() : score_intervals(fs, ys).mean_winkler;
          out << key.model << ',' << ledger.market << ',' << format_number(key.alpha) << ',' << h + 1 << ','
              << format_number(w) << '\n';
        }
      }
      break;
    }
    case PlotKind::pinball_percentile: {
      out << "model,market,percentile,pinball\n";
      std::vector<std::string> models;
      for (const auto& [key, entries] : series) {
        if (std::find(models.begin(), models.end(), key.model) == models.end()) models.push_back(key.model);
      }
      for (const auto& model : models) {
        for (const int pct : percentile_grid()) {
          const double tau = pct / 100.0;
          const double a = pct < 50 ? 2.0 * tau : 2.0 * (1.0 - tau);
          double total = 0.0;
          std::size_t count = 0;
          for (const auto& [key, entries] : series) {
            if (key.model != model || std::abs(key.alpha - a) > 1e-9) continue;
            for (const auto* e : entries) {
              if (e->forecast.unbounded) continue;
              total += pinball(pct < 50 ? e->forecast.lower : e->forecast.upper, e->realized, tau);
              ++count;
            }
          }
          if (count == 0) continue;
          out << model << ',' << ledger.market << ',' << pct << ',' << format_number(total / static_cast<double>(count))
              << '\n';
        }
      }
      break;
    }
    case PlotKind::coverage_dev: {
      out << "model,market,percentile,deviation,interpolated\n";
      for (const auto& [model, devs] : score_ledger(ledger).deviations) {
        for (const auto& d : devs) {
          out << model << ',' << ledger.market << ',' << d.percentile << ',' << format_number(d.deviation) << ','
              << (d.interpolated ? 1 : 0) << '\n';
        }
      }
      break;
    }
    case PlotKind::lr_hourly: {
      out << "model,market,alpha,hour,lr_uc,lr_ind,lr_cc\n";
      auto cap = [](double v) { return std::min(v, kPlotLrCap); };
      for (const auto& row : christoffersen_table(ledger)) {
        out << row.model << ',' << ledger.market << ',' << format_number(row.alpha) << ',' << row.hour + 1 << ','
            << format_number(cap(row.result.lr_uc)) << ',' << format_number(cap(row.result.lr_ind)) << ','
            << format_number(cap(row.result.lr_cc)) << '\n';
      }
      break;
    }
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config"] = m.config;
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << m.config_hash;
  j["config_hash"] = hash.str();
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["inputs"] = m.input_digests;
  j["outputs"] = m.output_digests;
  j["entries"] = m.entries;
  j["gaps"] = m.gaps;
  j["warnings"] = m.warnings;
  return j.dump(2) + "\n";
}

}  // namespace confpi
