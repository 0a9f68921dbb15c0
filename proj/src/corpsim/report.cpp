#include "corpsim/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <tuple>

#include "corpsim/util.hpp"

using nlohmann::json;

namespace corpsim {

namespace {

// Fields are language/country codes, enum names, and numbers, so no CSV
// quoting is ever needed.
class Csv {
 public:
  explicit Csv(std::string header) { out_ = std::move(header) + "\n"; }
  Csv &field(const std::string &v) { return raw(v); }
  Csv &field(const char *v) { return raw(v); }
  Csv &field(uint32_t v) { return raw(std::to_string(v)); }
  Csv &field(uint64_t v) { return raw(std::to_string(v)); }
  Csv &field(double v) { return raw(format_double(v)); }
  Csv &field(bool v) { return raw(v ? "true" : "false"); }
  void endrow() {
    out_.push_back('\n');
    first_ = true;
  }
  const std::string &text() const { return out_; }

 private:
  Csv &raw(const std::string &v) {
    if (!first_) out_.push_back(',');
    first_ = false;
    out_ += v;
    return *this;
  }
  std::string out_;
  bool first_ = true;
};

void write(const std::string &dir, const std::string &name,
           const std::string &content) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir + "/" + name, content);
}

json sidecar_base(const char *experiment, const std::string &config_digest,
                  uint64_t seed, const std::vector<std::string> &warnings) {
  json doc;
  doc["experiment"] = experiment;
  doc["config_digest"] = config_digest;
  doc["seed"] = seed;
  doc["warnings"] = warnings;
  return doc;
}

void stats_fields(Csv &csv, const Summary &s) {
  csv.field(s.mean)
      .field(s.sd)
      .field(s.min)
      .field(s.q1)
      .field(s.median)
      .field(s.q3)
      .field(s.max);
}

}  // namespace

void write_exp1_report(const std::string &dir, const Exp1Report &report,
                       const std::string &config_digest, uint64_t seed) {
  Csv csv("language,country,register,kind,pairs,mean,sd,min,q1,median,q3,max");
  for (const Exp1Cell &cell : report.cells) {
    csv.field(cell.key.language)
        .field(cell.key.country)
        .field(to_string(cell.key.reg))
        .field(to_string(cell.kind))
        .field(cell.pairs);
    stats_fields(csv, cell.stats);
    csv.endrow();
  }
  write(dir, "exp1.csv", csv.text());

  Csv summary("language,register,kind,cells,mean_rho");
  for (const Exp1Summary &row : report.summary) {
    summary.field(row.language)
        .field(to_string(row.reg))
        .field(to_string(row.kind))
        .field(row.cells)
        .field(row.mean_rho);
    summary.endrow();
  }
  write(dir, "exp1_summary.csv", summary.text());

  json doc = sidecar_base("exp1", config_digest, seed, report.warnings);
  json scores = json::object();
  for (const Exp1Cell &cell : report.cells)
    scores[cell.key.label() + "|" + to_string(cell.kind)] = cell.scores;
  doc["scores"] = std::move(scores);
  write(dir, "exp1.json", doc.dump(2) + "\n");
}

void write_exp2_report(const std::string &dir, const Exp2Report &report,
                       const std::string &config_digest, uint64_t seed) {
  Csv csv(
      "language,kind,varieties,pairs_same,pairs_cross,same_mean,cross_mean,"
      "correct,accuracy");
  for (const Exp2Row &row : report.rows) {
    csv.field(row.language)
        .field(to_string(row.kind))
        .field(row.varieties)
        .field(row.pairs_same)
        .field(row.pairs_cross)
        .field(row.same_mean)
        .field(row.cross_mean)
        .field(row.correct)
        .field(row.accuracy);
    csv.endrow();
  }
  write(dir, "exp2.csv", csv.text());

  json doc = sidecar_base("exp2", config_digest, seed, report.warnings);
  json scores = json::object();
  for (const Exp2Row &row : report.rows) {
    const std::string key = row.language + "|" + to_string(row.kind);
    scores[key + "|same_register"] = row.same_scores;
    scores[key + "|cross_register"] = row.cross_scores;
  }
  doc["scores"] = std::move(scores);
  write(dir, "exp2.json", doc.dump(2) + "\n");
}

void write_exp3_report(const std::string &dir, const Exp3Report &report,
                       const std::string &config_digest, uint64_t seed) {
  Csv csv("language,country,kind,pairs,mean,sd,min,q1,median,q3,max");
  for (const Exp3Row &row : report.rows) {
    csv.field(row.language)
        .field(row.country)
        .field(to_string(row.kind))
        .field(row.pairs);
    stats_fields(csv, row.stats);
    csv.endrow();
  }
  write(dir, "exp3.csv", csv.text());

  json doc = sidecar_base("exp3", config_digest, seed, report.warnings);
  json scores = json::object();
  json kinds = json::object();
  for (const Exp3Row &row : report.rows) {
    scores[row.language + "_" + row.country] = row.scores;
    kinds[row.language + "_" + row.country] = to_string(row.kind);
  }
  doc["scores"] = std::move(scores);
  doc["kinds"] = std::move(kinds);
  write(dir, "exp3.json", doc.dump(2) + "\n");
}

void write_exp4_report(const std::string &dir, const Exp4Report &report,
                       const std::string &config_digest, uint64_t seed) {
  Csv csv(
      "language,register,kind,pairs_same,pairs_diff,same_mean,diff_mean,t,df,"
      "p,significant");
  for (const Exp4Row &row : report.rows) {
    csv.field(row.language)
        .field(to_string(row.reg))
        .field(to_string(row.kind))
        .field(row.pairs_same)
        .field(row.pairs_diff)
        .field(row.same_mean)
        .field(row.diff_mean)
        .field(row.test.statistic)
        .field(row.test.df)
        .field(row.test.p_value)
        .field(row.test.significant);
    csv.endrow();
  }
  write(dir, "exp4.csv", csv.text());
  json doc = sidecar_base("exp4", config_digest, seed, report.warnings);
  json scores = json::object();
  for (const Exp4Row &row : report.rows) {
    const std::string key =
        row.language + "|" + to_string(row.reg) + "|" + to_string(row.kind);
    scores[key + "|same_variety"] = row.same_scores;
    scores[key + "|different_variety"] = row.diff_scores;
  }
  doc["scores"] = std::move(scores);
  write(dir, "exp4.json", doc.dump(2) + "\n");
}

void write_exp5_report(const std::string &dir, const Exp5Report &report,
                       const std::string &config_digest, uint64_t seed) {
  Csv ranks("language,country,register,rho_centroid,rank");
  for (const Exp5Rank &row : report.ranks) {
    ranks.field(row.language)
        .field(row.country)
        .field(to_string(row.reg))
        .field(row.rho_centroid)
        .field(row.rank);
    ranks.endrow();
  }
  write(dir, "exp5_ranks.csv", ranks.text());

  Csv csv("language,varieties,rho,p,significant");
  for (const Exp5Row &row : report.rows) {
    csv.field(row.language)
        .field(row.varieties)
        .field(row.test.statistic)
        .field(row.test.p_value)
        .field(row.test.significant);
    csv.endrow();
  }
  write(dir, "exp5.csv", csv.text());

  json doc = sidecar_base("exp5", config_digest, seed, report.warnings);
  json rho = json::object();
  for (const Exp5Rank &row : report.ranks)
    rho[row.language + "_" + row.country + "_" + to_string(row.reg)] =
        row.rho_centroid;
  doc["rho_centroid"] = std::move(rho);
  write(dir, "exp5.json", doc.dump(2) + "\n");
}

void write_geo_report(const std::string &dir, const GeoReport &report,
                      const std::string &config_digest, uint64_t seed) {
  Csv csv("country,languages,mean_rho");
  for (const GeoRow &row : report.rows) {
    csv.field(row.country).field(row.languages).field(row.mean_rho);
    csv.endrow();
  }
  write(dir, "geo.csv", csv.text());

  json doc = sidecar_base("geo", config_digest, seed, {});
  json countries = json::object();
  for (const GeoRow &row : report.rows)
    countries[row.country] =
        json{{"languages", row.languages}, {"mean_rho", row.mean_rho}};
  doc["countries"] = std::move(countries);
  write(dir, "geo.json", doc.dump(2) + "\n");
}

Exp3Report load_exp3_sidecar(const std::string &path) {
  json doc = json::parse(read_file(path), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() ||
      doc.value("experiment", "") != "exp3")
    fail("%s: not an exp3 sidecar", path.c_str());
  Exp3Report report;
  try {
    for (const auto &[label, arr] : doc.at("scores").items()) {
      size_t sep = label.rfind('_');
      if (sep == std::string::npos || sep == 0 || sep + 1 >= label.size())
        fail("%s: malformed cell label \"%s\"", path.c_str(), label.c_str());
      Exp3Row row;
      row.language = label.substr(0, sep);
      row.country = label.substr(sep + 1);
      row.kind = kind_from_string(
          doc.at("kinds").at(label).get<std::string>());
      row.scores = arr.get<std::vector<double>>();
      if (row.scores.empty())
        fail("%s: cell %s has no scores", path.c_str(), label.c_str());
      row.pairs = static_cast<uint32_t>(row.scores.size());
      row.stats = descriptive_stats(row.scores);
      report.rows.push_back(std::move(row));
    }
    if (doc.contains("warnings"))
      report.warnings = doc.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception &e) {
    fail("%s: malformed exp3 sidecar: %s", path.c_str(), e.what());
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const Exp3Row &a, const Exp3Row &b) {
              return std::tie(a.language, a.country) <
                     std::tie(b.language, b.country);
            });
  return report;
}

void emit_plot_data(const std::string &dir, const Exp3Report &exp3,
                    const GeoReport &geo) {
  bool any_scores = false;
  for (const Exp3Row &row : exp3.rows)
    if (!row.scores.empty()) any_scores = true;
  if (!any_scores)
    fail("raw scores required: the cross-register report is summary-only");

  std::map<std::string, json> languages;
  for (const Exp3Row &row : exp3.rows) {
    json entry{{"pairs", row.pairs},
               {"scores", row.scores},
               {"mean", row.stats.mean},
               {"sd", row.stats.sd},
               {"min", row.stats.min},
               {"q1", row.stats.q1},
               {"median", row.stats.median},
               {"q3", row.stats.q3},
               {"max", row.stats.max}};
    languages[row.language]["countries"][row.country] = std::move(entry);
  }
  for (auto &[language, doc] : languages) {
    doc["language"] = language;
    write(dir + "/plots", language + ".json", doc.dump(2) + "\n");
  }

  json map_doc;
  json countries = json::object();
  for (const GeoRow &row : geo.rows)
    countries[row.country] =
        json{{"languages", row.languages}, {"mean_rho", row.mean_rho}};
  map_doc["countries"] = std::move(countries);
  write(dir + "/plots", "map.json", map_doc.dump(2) + "\n");
}

}  // namespace corpsim
