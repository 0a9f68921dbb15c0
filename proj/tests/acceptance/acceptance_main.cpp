// Acceptance gate: drives the public C API end to end and prints one
// PASS/FAIL line per criterion. Exit status is the number of failed
// criteria, so CTest reports the gate as a single unit.
//
// The reference implementations in this file (ranks, Pearson, permutation
// enumeration) are deliberately written from scratch rather than calling
// into the library, so a shared bug cannot vouch for itself.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpsim/corpsim.h"
#include "corpsim/features.hpp"
#include "corpsim/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using steady = std::chrono::steady_clock;

namespace {

int g_failures = 0;

std::string fmt(const char *f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[1024];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void record(int id, const char *title, bool pass, const std::string &detail) {
  if (!pass) ++g_failures;
  std::printf("%s  %d. %s  [%s]\n", pass ? "PASS" : "FAIL", id, title,
              detail.c_str());
  std::fflush(stdout);
}

void note(const std::string &line) {
  std::printf("      %s\n", line.c_str());
  std::fflush(stdout);
}

double elapsed(steady::time_point t0) {
  return std::chrono::duration<double>(steady::now() - t0).count();
}

std::string api_error() {
  const char *e = corpsim_last_error();
  return e && *e ? e : "(no error message)";
}

bool bits_equal(double a, double b) {
  uint64_t ua, ub;
  std::memcpy(&ua, &a, sizeof a);
  std::memcpy(&ub, &b, sizeof b);
  return ua == ub;
}

// ---- independent numeric references --------------------------------

std::vector<double> ref_ranks(const std::vector<double> &v) {
  size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t i, size_t j) { return v[i] > v[j]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    double avg = (double(i + 1) + double(j)) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double ref_pearson(const std::vector<double> &a, const std::vector<double> &b) {
  size_t n = a.size();
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / double(n);
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / double(n);
  double sab = 0, sa = 0, sb = 0;
  for (size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    sa += (a[i] - ma) * (a[i] - ma);
    sb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(sa * sb);
}

double ref_spearman(const std::vector<double> &a, const std::vector<double> &b) {
  return ref_pearson(ref_ranks(a), ref_ranks(b));
}

// Exhaustive two-sided permutation p over all n! orders of ys. The guard
// band keeps rank permutations that tie the observed |rho| inside the
// rejection count despite floating-point noise.
double ref_permutation_p(const std::vector<double> &xs,
                         const std::vector<double> &ys) {
  auto rx = ref_ranks(xs);
  auto ry = ref_ranks(ys);
  double observed = std::fabs(ref_pearson(rx, ry)) - 1e-12;
  std::vector<size_t> perm(ys.size());
  std::iota(perm.begin(), perm.end(), size_t{0});
  uint64_t hits = 0, count = 0;
  std::vector<double> shuffled(ys.size());
  do {
    for (size_t i = 0; i < perm.size(); ++i) shuffled[i] = ry[perm[i]];
    if (std::fabs(ref_pearson(rx, shuffled)) >= observed) ++hits;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return double(hits) / double(count);
}

bool is_constant(const std::vector<double> &v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) ==
         v.end();
}

bool has_duplicate(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

bool has_zero(const std::vector<double> &v) {
  return std::find(v.begin(), v.end(), 0.0) != v.end();
}

// Uniform integer-valued vector in [lo, hi], regenerated until non-constant.
std::vector<double> random_vector(std::mt19937_64 &rng, size_t n, int lo,
                                  int hi) {
  std::uniform_int_distribution<int> val(lo, hi);
  std::vector<double> v(n);
  do {
    for (auto &x : v) x = double(val(rng));
  } while (is_constant(v));
  return v;
}

// ---- small file helpers ---------------------------------------------

std::vector<std::string> read_lines(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// Rows of a CSV file keyed by the header line; fails hard on a missing
// file so a broken pipeline run surfaces as a criterion failure.
struct CsvFile {
  std::string header;
  std::vector<std::vector<std::string>> rows;
  bool ok = false;
};

CsvFile load_csv(const fs::path &path) {
  CsvFile csv;
  auto lines = read_lines(path.string());
  if (lines.empty()) return csv;
  csv.header = lines[0];
  for (size_t i = 1; i < lines.size(); ++i)
    if (!lines[i].empty()) csv.rows.push_back(split(lines[i], ','));
  csv.ok = true;
  return csv;
}

double mean_of(const std::vector<double> &v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

// ---- criteria 1-5: numeric kernels through the C API ----------------

void criterion_1() {
  auto t0 = steady::now();
  std::mt19937_64 rng(20260818ull);
  std::uniform_int_distribution<int> len(2, 100);
  int tied = 0, with_zero = 0;
  double worst = 0.0;
  std::string err;
  for (int trial = 0; trial < 1000 && err.empty(); ++trial) {
    size_t n = size_t(len(rng));
    // Every fourth pair draws from {0..4} so ties and zeros stay dense
    // even at short lengths.
    int hi = trial % 4 == 0 ? 4 : 50;
    auto a = random_vector(rng, n, 0, hi);
    auto b = random_vector(rng, n, 0, hi);
    if (has_duplicate(a) || has_duplicate(b)) ++tied;
    if (has_zero(a) || has_zero(b)) ++with_zero;
    double rho = 0.0;
    if (corpsim_spearman(a.data(), b.data(), n, &rho) != 0) {
      err = api_error();
      break;
    }
    worst = std::max(worst, std::fabs(rho - ref_spearman(a, b)));
  }
  double secs = elapsed(t0);
  bool pass = err.empty() && worst <= 1e-10 && tied >= 100 &&
              with_zero >= 50 && secs < 10.0;
  record(1, "spearman matches a naive rank reference on 1000 random pairs",
         pass,
         err.empty()
             ? fmt("max |diff| %.3g, %d tied pairs, %d pairs with zeros, %.2fs",
                   worst, tied, with_zero, secs)
             : "corpsim_spearman failed: " + err);
}

void criterion_2() {
  double down = 0, half = 0, chi = 0;
  const double a1[] = {5, 3, 2}, b1[] = {2, 3, 5};
  const double a2[] = {4, 4, 2}, b2[] = {4, 2, 4};
  const uint32_t c1[] = {4, 1}, c2[] = {1, 4};
  bool ok = corpsim_spearman(a1, b1, 3, &down) == 0 &&
            corpsim_spearman(a2, b2, 3, &half) == 0 &&
            corpsim_chi_square(c1, c2, 2, &chi) == 0;
  bool pass = ok && down == -1.0 && std::fabs(half + 0.5) <= 1e-12 &&
              std::fabs(chi - 3.6) <= 1e-12;
  record(2, "hand-checked values: rho -1.0 exact, rho -0.5, chi-square 3.6",
         pass,
         ok ? fmt("rho(5,3,2 / 2,3,5)=%g, rho(4,4,2 / 4,2,4)=%.12f, chi2=%.12f",
                  down, half, chi)
            : "kernel call failed: " + api_error());
}

void criterion_3() {
  std::mt19937_64 rng(31ull);
  std::uniform_int_distribution<int> len(3, 80);
  const double scales[] = {2.0, 10.0, 1000.0};
  int checked = 0;
  std::string err;
  bool pass = true;
  for (int trial = 0; trial < 200 && pass && err.empty(); ++trial) {
    size_t n = size_t(len(rng));
    auto a = random_vector(rng, n, 0, 50);
    auto b = random_vector(rng, n, 0, 50);
    double base = 0.0;
    if (corpsim_spearman(a.data(), b.data(), n, &base) != 0) {
      err = api_error();
      break;
    }
    pass = base >= -1.0 && base <= 1.0;
    for (double c : scales) {
      std::vector<double> scaled(n);
      for (size_t i = 0; i < n; ++i) scaled[i] = a[i] * c;
      double rho = 0.0;
      if (corpsim_spearman(scaled.data(), b.data(), n, &rho) != 0) {
        err = api_error();
        break;
      }
      pass = pass && bits_equal(rho, base);
    }
    double swapped = 0.0;
    if (err.empty() && corpsim_spearman(b.data(), a.data(), n, &swapped) != 0)
      err = api_error();
    pass = pass && err.empty() && bits_equal(swapped, base);
    ++checked;
  }
  record(3, "scaling and symmetry leave rho bit-identical on 200 vectors",
         pass && err.empty(),
         err.empty() ? fmt("%d vectors, scales 2/10/1000, all in [-1,1]",
                           checked)
                     : "corpsim_spearman failed: " + err);
}

void criterion_4() {
  const fs::path path = fs::path(CORPSIM_TEST_DATA_DIR) / "welch_fixtures.tsv";
  auto lines = read_lines(path.string());
  int rows = 0;
  double worst = 0.0;
  bool pass = true;
  std::string err;
  for (const auto &line : lines) {
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 7) {
      err = "malformed fixture row";
      break;
    }
    auto parse_list = [](const std::string &s) {
      std::vector<double> v;
      for (const auto &tok : split(s, ',')) v.push_back(std::stod(tok));
      return v;
    };
    auto a = parse_list(cols[2]);
    auto b = parse_list(cols[3]);
    double t = 0, df = 0, p = 0;
    if (corpsim_welch(a.data(), a.size(), b.data(), b.size(), 0.05, &t, &df,
                      &p) != 0) {
      err = api_error();
      break;
    }
    worst = std::max({worst, std::fabs(t - std::stod(cols[4])),
                      std::fabs(df - std::stod(cols[5])),
                      std::fabs(p - std::stod(cols[6]))});
    double t_rev = 0;
    if (corpsim_welch(b.data(), b.size(), a.data(), a.size(), 0.05, &t_rev,
                      nullptr, nullptr) != 0) {
      err = api_error();
      break;
    }
    pass = pass && t_rev == -t;
    ++rows;
  }
  pass = pass && err.empty() && rows == 100 && worst <= 1e-9;
  record(4, "welch t-test matches 100 stored reference triples", pass,
         err.empty() ? fmt("%d fixtures, max |diff| %.3g, antisymmetry holds",
                           rows, worst)
                     : err);
}

void criterion_5() {
  std::mt19937_64 rng(5ull);
  int tested = 0;
  bool pass = true;
  std::string err;
  for (size_t n = 3; n <= 6 && pass && err.empty(); ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      // Alternate tie-heavy and spread-out draws.
      int hi = trial % 2 == 0 ? 3 : 100;
      auto xs = random_vector(rng, n, 0, hi);
      auto ys = random_vector(rng, n, 0, hi);
      double rho = 0, p = 0;
      if (corpsim_spearman_test(xs.data(), ys.data(), n, 0.05, &rho, &p) !=
          0) {
        err = api_error();
        break;
      }
      if (p != ref_permutation_p(xs, ys)) {
        pass = false;
        break;
      }
      ++tested;
    }
  }
  record(5, "permutation p-values equal exhaustive enumeration for n <= 6",
         pass && err.empty(),
         err.empty() ? fmt("%d random pairs across n=3..6, all p bit-equal",
                           tested)
                     : "corpsim_spearman_test failed: " + err);
}

// ---- criteria 6-7: pipeline runs on the synthetic corpus -------------

struct RunOutcome {
  bool ok = false;
  double secs = 0.0;
  std::string err;
};

// One pipeline invocation through the C API. experiments/stages may be
// null to keep the config defaults (all experiments, all stages).
RunOutcome pipeline_run(const fs::path &corpus, const fs::path &workspace,
                        int workers, uint64_t seed, const char *experiments,
                        const char *stages, bool force) {
  RunOutcome out;
  corpsim_config *cfg = corpsim_config_new();
  if (!cfg) {
    out.err = "allocation failure";
    return out;
  }
  auto set = [&](const char *k, const std::string &v) {
    if (corpsim_config_set(cfg, k, v.c_str()) != 0) {
      if (out.err.empty()) out.err = api_error();
      return false;
    }
    return true;
  };
  bool ok = set("corpus", corpus.string()) &&
            set("workspace", workspace.string()) &&
            set("sample_size", "100000") && set("vocab_k", "20000") &&
            set("seed", std::to_string(seed)) &&
            set("workers", std::to_string(workers));
  if (ok && experiments) ok = set("experiments", experiments);
  if (ok && force) ok = set("force", "true");
  if (ok) {
    auto t0 = steady::now();
    if (corpsim_run(cfg, stages) != 0)
      out.err = api_error();
    else
      out.ok = true;
    out.secs = elapsed(t0);
  }
  corpsim_config_free(cfg);
  return out;
}

bool generate_corpus(const fs::path &path, std::string &err) {
  corpsim_config *cfg = corpsim_config_new();
  if (!cfg) {
    err = "allocation failure";
    return false;
  }
  const std::pair<const char *, std::string> keys[] = {
      {"synth.out", path.string()}, {"synth.languages", "2"},
      {"synth.varieties", "4"},     {"synth.registers", "2"},
      {"synth.samples_per_cell", "5"}, {"synth.sample_size", "100000"},
      {"synth.doc_tokens", "500"},  {"synth.types", "30000"},
      {"synth.zipf_s", "1.07"},     {"synth.register_div", "0.8"},
      {"synth.variety_div", "0.25"}, {"synth.seed", "1"},
  };
  bool ok = true;
  for (const auto &[k, v] : keys)
    if (corpsim_config_set(cfg, k, v.c_str()) != 0) {
      err = api_error();
      ok = false;
      break;
    }
  if (ok && corpsim_synth(cfg) != 0) {
    err = api_error();
    ok = false;
  }
  corpsim_config_free(cfg);
  return ok;
}

// Register cc becomes a byte-copy of register tw: tw lines are kept and
// re-emitted with only the register field rewritten; original cc lines
// are dropped. Works on the generator's serialized form directly so the
// document text is bit-identical across registers.
bool write_copied_register_corpus(const fs::path &src, const fs::path &dst,
                                  std::string &err) {
  std::ifstream in(src, std::ios::binary);
  std::ofstream out(dst, std::ios::binary | std::ios::trunc);
  if (!in || !out) {
    err = "cannot open corpus files";
    return false;
  }
  const std::string tw = "\"register\":\"tw\"";
  const std::string cc = "\"register\":\"cc\"";
  std::string line;
  uint64_t kept = 0, dropped = 0;
  while (std::getline(in, line)) {
    if (line.find(cc) != std::string::npos) {
      ++dropped;
      continue;
    }
    size_t pos = line.find(tw);
    if (pos == std::string::npos) {
      err = "corpus line without a register field";
      return false;
    }
    out << line << '\n';
    std::string copy = line;
    copy.replace(pos, tw.size(), cc);
    out << copy << '\n';
    ++kept;
  }
  out.flush();
  if (!out || kept == 0 || dropped == 0) {
    err = fmt("register copy produced %llu tw lines, dropped %llu cc lines",
              (unsigned long long)kept, (unsigned long long)dropped);
    return false;
  }
  return true;
}

// Relative path -> file bytes for everything under a reports tree.
std::map<std::string, std::string> snapshot_reports(const fs::path &dir,
                                                    std::string &err) {
  std::map<std::string, std::string> files;
  if (!fs::is_directory(dir)) {
    err = "missing reports directory " + dir.string();
    return files;
  }
  for (const auto &entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    files[fs::relative(entry.path(), dir).generic_string()] =
        corpsim::read_file(entry.path().string());
  }
  return files;
}

struct ShapeCheck {
  bool ok = false;
  std::string detail = "pipeline run failed";
};

void criteria_6_and_7(ShapeCheck &shape) {
  const char *title6 = "desk-scale synthetic corpus reproduces the effects";
  const char *title7 = "1-worker and 8-worker runs emit identical bytes";
  const fs::path scratch = CORPSIM_ACCEPTANCE_SCRATCH;
  std::error_code ec;
  fs::remove_all(scratch, ec);
  fs::create_directories(scratch);
  const fs::path corpus = scratch / "corpus.jsonl";
  const fs::path ws1 = scratch / "ws_w1";
  const fs::path ws8 = scratch / "ws_w8";

  // Criterion 6 clock: generation, the 8-worker run, the seed sweep and
  // the copied-register run. The extra 1-worker run belongs to criterion 7.
  double budget_secs = 0.0;
  std::string err;
  auto t_synth = steady::now();
  if (!generate_corpus(corpus, err)) {
    record(6, title6, false, "corpus generation failed: " + err);
    record(7, title7, false, "corpus generation failed: " + err);
    return;
  }
  budget_secs += elapsed(t_synth);
  note(fmt("synthetic corpus generated in %.1fs (%ju bytes)",
           budget_secs, (uintmax_t)fs::file_size(corpus)));

  RunOutcome main_run =
      pipeline_run(corpus, ws8, 8, 1, nullptr, nullptr, false);
  if (!main_run.ok) {
    record(6, title6, false, "8-worker run failed: " + main_run.err);
    record(7, title7, false, "8-worker run failed: " + main_run.err);
    return;
  }
  budget_secs += main_run.secs;
  note(fmt("full 8-worker pipeline run in %.1fs", main_run.secs));
  const fs::path reports8 = ws8 / "reports";

  // (a) exp2 nearest-centroid accuracy on char trigrams.
  auto exp2 = load_csv(reports8 / "exp2.csv");
  double acc_min = 2.0;
  int char_rows = 0;
  for (const auto &row : exp2.rows)
    if (row.size() >= 9 && row[1] == "char3") {
      acc_min = std::min(acc_min, std::stod(row[8]));
      ++char_rows;
    }
  bool a_ok = exp2.ok && char_rows == 2 && acc_min >= 0.95;

  // (b) per-variety margin: pooled same-cell mean (exp1, char3, both
  // registers) minus the cross-register mean (exp3).
  double margin_min = 1e9;
  int varieties = 0;
  bool b_ok = true;
  try {
    json exp1 = json::parse(corpsim::read_file((reports8 / "exp1.json").string()));
    json exp3 = json::parse(corpsim::read_file((reports8 / "exp3.json").string()));
    for (const auto &[variety, cross_scores] : exp3.at("scores").items()) {
      std::vector<double> same;
      for (const char *reg : {"_tw|char3", "_cc|char3"})
        for (double s : exp1.at("scores").at(variety + reg))
          same.push_back(s);
      double margin = mean_of(same) - mean_of(cross_scores.get<std::vector<double>>());
      margin_min = std::min(margin_min, margin);
      ++varieties;
    }
    b_ok = varieties == 8 && margin_min > 0.0;
  } catch (const std::exception &e) {
    b_ok = false;
    err = e.what();
  }
  note(fmt("exp2 char3 min accuracy %.3f; exp1-exp3 margin min %.4f over %d varieties",
           acc_min <= 1.0 ? acc_min : -1.0, margin_min, varieties));

  // Report-shape evidence for criterion 9, captured before the seed sweep
  // overwrites the experiment outputs.
  {
    const std::pair<const char *, const char *> expected[] = {
        {"exp1.csv",
         "language,country,register,kind,pairs,mean,sd,min,q1,median,q3,max"},
        {"exp1_summary.csv", "language,register,kind,cells,mean_rho"},
        {"exp2.csv",
         "language,kind,varieties,pairs_same,pairs_cross,same_mean,cross_mean,"
         "correct,accuracy"},
        {"exp3.csv",
         "language,country,kind,pairs,mean,sd,min,q1,median,q3,max"},
        {"exp4.csv",
         "language,register,kind,pairs_same,pairs_diff,same_mean,diff_mean,t,"
         "df,p,significant"},
        {"exp5.csv", "language,varieties,rho,p,significant"},
        {"exp5_ranks.csv", "language,country,register,rho_centroid,rank"},
        {"geo.csv", "country,languages,mean_rho"},
    };
    shape.ok = true;
    std::string bad;
    for (const auto &[name, header] : expected) {
      auto csv = load_csv(reports8 / name);
      if (!csv.ok || csv.header != header || csv.rows.empty()) {
        shape.ok = false;
        bad = name;
      }
    }
    shape.detail = shape.ok
                       ? "all 8 report tables present with documented columns"
                       : "report table " + bad + " missing or mis-shaped";
  }

  // Criterion 7 needs the pristine 8-worker reports, so the comparison
  // run happens before the seed sweep (its time is not on the 6 clock).
  RunOutcome w1_run = pipeline_run(corpus, ws1, 1, 1, nullptr, nullptr, false);
  bool c7_pass = false;
  std::string c7_detail;
  if (!w1_run.ok) {
    c7_detail = "1-worker run failed: " + w1_run.err;
  } else {
    std::string snap_err;
    auto files1 = snapshot_reports(ws1 / "reports", snap_err);
    auto files8 = snapshot_reports(reports8, snap_err);
    if (!snap_err.empty()) {
      c7_detail = snap_err;
    } else if (files1.empty() || files1.size() != files8.size()) {
      c7_detail = fmt("file sets differ: %zu vs %zu", files1.size(),
                      files8.size());
    } else {
      c7_pass = true;
      for (const auto &[rel, bytes] : files1) {
        auto it = files8.find(rel);
        if (it == files8.end() || it->second != bytes) {
          c7_pass = false;
          c7_detail = "byte mismatch in " + rel;
          break;
        }
      }
      if (c7_pass)
        c7_detail = fmt("%zu report files byte-identical (%.1fs vs %.1fs)",
                        files1.size(), w1_run.secs, main_run.secs);
    }
  }
  fs::remove_all(ws1, ec);

  // (c) exp4 significance across 20 experiment seeds over the same corpus.
  int significant_seeds = 0;
  auto t_seeds = steady::now();
  std::string seed_err;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    RunOutcome rerun = pipeline_run(corpus, ws8, 8, seed, "exp4", "exp", true);
    if (!rerun.ok) {
      seed_err = fmt("seed %llu: ", (unsigned long long)seed) + rerun.err;
      break;
    }
    auto exp4 = load_csv(reports8 / "exp4.csv");
    bool all_significant = exp4.ok && exp4.rows.size() == 4;
    for (const auto &row : exp4.rows)
      all_significant = all_significant && row.size() == 11 && row[10] == "true";
    if (all_significant) ++significant_seeds;
  }
  budget_secs += elapsed(t_seeds);
  bool c_ok = seed_err.empty() && significant_seeds >= 18;
  note(fmt("exp4 significant in %d/20 seeds (sweep %.1fs)", significant_seeds,
           elapsed(t_seeds)));

  // (d) byte-copied register: centroid rank correlation must be exactly 1.
  bool d_ok = false;
  std::string d_note;
  auto t_copy = steady::now();
  const fs::path copy_corpus = scratch / "corpus_copied_register.jsonl";
  const fs::path ws_copy = scratch / "ws_copy";
  if (!write_copied_register_corpus(corpus, copy_corpus, d_note)) {
    d_note = "register copy failed: " + d_note;
  } else {
    RunOutcome copy_run =
        pipeline_run(copy_corpus, ws_copy, 8, 1, "exp5", nullptr, false);
    if (!copy_run.ok) {
      d_note = "copied-register run failed: " + copy_run.err;
    } else {
      auto exp5 = load_csv(ws_copy / "reports" / "exp5.csv");
      d_ok = exp5.ok && exp5.rows.size() >= 3;
      for (const auto &row : exp5.rows) {
        if (row.size() < 3 || std::stod(row[2]) != 1.0) d_ok = false;
      }
      d_note = d_ok ? fmt("rho exactly 1.0 in all %zu exp5 rows",
                          exp5.rows.size())
                    : "exp5 rho departed from 1.0";
    }
  }
  budget_secs += elapsed(t_copy);
  note(d_note + fmt(" (copied-register leg %.1fs)", elapsed(t_copy)));
  fs::remove_all(ws_copy, ec);

  bool pass6 = a_ok && b_ok && c_ok && d_ok && budget_secs <= 600.0;
  record(6, title6, pass6,
         fmt("accuracy>=0.95 %s, margins>0 %s, seeds %d/20, copy rho==1 %s, "
             "%.0fs of 600s budget",
             a_ok ? "yes" : "NO", b_ok ? "yes" : "NO", significant_seeds,
             d_ok ? "yes" : "NO", budget_secs));
  record(7, title7, c7_pass, c7_detail);
}

// ---- criterion 8: throughput ----------------------------------------

void criterion_8() {
  // 1M tokens as 2000 pre-tokenized docs over a 30k-type Zipf vocabulary.
  const size_t types = 30000, docs_n = 2000, doc_len = 500;
  std::vector<std::string> words(types);
  for (size_t i = 0; i < types; ++i) {
    std::string w;
    size_t x = i + 26;
    while (x > 0) {
      w.push_back(char('a' + x % 26));
      x /= 26;
    }
    words[i] = w;
  }
  std::vector<double> cdf(types);
  double total = 0.0;
  for (size_t r = 0; r < types; ++r)
    cdf[r] = (total += 1.0 / std::pow(double(r + 1), 1.07));
  for (auto &c : cdf) c /= total;
  std::mt19937_64 rng(8ull);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<std::vector<std::string>> docs(docs_n);
  for (auto &doc : docs) {
    doc.reserve(doc_len);
    for (size_t t = 0; t < doc_len; ++t) {
      size_t type = size_t(std::upper_bound(cdf.begin(), cdf.end(), uni(rng)) -
                           cdf.begin());
      doc.push_back(words[std::min(type, types - 1)]);
    }
  }
  std::span<const std::vector<std::string>> span(docs);
  auto t0 = steady::now();
  auto word_counts = corpsim::count_features(span, corpsim::FeatureKind::WordUnigram);
  auto char_counts = corpsim::count_features(span, corpsim::FeatureKind::CharTrigram);
  double count_secs = elapsed(t0);

  const size_t dims = 100000;
  std::uniform_int_distribution<int> val(0, 1000);
  std::vector<double> a(dims), b(dims);
  for (size_t i = 0; i < dims; ++i) {
    a[i] = double(val(rng));
    b[i] = double(val(rng));
  }
  double best_ms = 1e9;
  double rho = 0.0;
  bool ok = true;
  for (int run = 0; run < 3 && ok; ++run) {
    auto s0 = steady::now();
    ok = corpsim_spearman(a.data(), b.data(), dims, &rho) == 0;
    best_ms = std::min(best_ms, elapsed(s0) * 1000.0);
  }
  bool pass = ok && count_secs < 5.0 && best_ms < 50.0;
  record(8, "1M-token counting under 5s, 100k-dim spearman under 50ms", pass,
         ok ? fmt("word+char3 counting %.2fs (%zu + %zu features), spearman "
                  "%.1fms (rho %.4f)",
                  count_secs, word_counts.counts.size(),
                  char_counts.counts.size(), best_ms,
                  rho)
            : "corpsim_spearman failed: " + api_error());
}

// ---- criterion 9: reference-value documentation ----------------------

void criterion_9(const ShapeCheck &shape) {
  std::string readme;
  try {
    readme = corpsim::read_file(CORPSIM_README_PATH);
  } catch (const std::exception &) {
  }
  // Anchor values the documentation must carry: register-classification
  // accuracies, cross-register similarity examples, the pooled and
  // per-language agreement correlations, and the country-level aggregate,
  // plus the stated tolerance.
  const char *anchors[] = {"93.9", "98.9", "0.84", "0.81", "0.72",
                           "0.64",  "0.453", "0.899", "0.43", "0.53",
                           "0.855", "0.02"};
  std::string missing;
  for (const char *a : anchors)
    if (readme.find(a) == std::string::npos) missing = a;
  bool readme_ok = !readme.empty() && missing.empty();
  bool pass = readme_ok && shape.ok;
  std::string detail;
  if (readme.empty())
    detail = "README not found at " CORPSIM_README_PATH;
  else if (!missing.empty())
    detail = "README lacks reference value " + missing;
  else
    detail = "reference values documented with tolerance; " + shape.detail;
  record(9, "reference values documented and report tables shaped as specified",
         pass, detail);
}

}  // namespace

int main() {
  std::printf("corpsim acceptance gate, library %s\n", corpsim_version());
  std::fflush(stdout);
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  ShapeCheck shape;
  criteria_6_and_7(shape);
  criterion_8();
  criterion_9(shape);
  std::printf("%d of 9 criteria failed\n", g_failures);
  return g_failures;
}
