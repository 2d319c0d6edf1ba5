#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "aslcheck/checker.hpp"
#include "aslcheck/error.hpp"
#include "aslcheck/gen.hpp"

namespace aslcheck {

enum class TruthSelection { Asl, NotAsl, Both };

struct BenchPlan {
  /// Exponents: |D| = 2^i for i in i_range, |Omega| = 2^j for j in j_range.
  std::vector<int> i_range;
  std::vector<int> j_range;
  int reps = 1;
  TruthSelection truth = TruthSelection::Both;
  std::vector<MethodChoice> methods;
  std::uint64_t seed = 1;
  std::size_t k_previsions = 32;
  double delta = 0.05;
  Bias bias = Bias::None;

  void validate() const {
    if (i_range.empty() || j_range.empty()) throw Error(ErrorKind::InvalidArgument, "exponent ranges must be nonempty");
    if (reps < 1) throw Error(ErrorKind::InvalidArgument, "reps must be >= 1");
    if (methods.empty()) throw Error(ErrorKind::InvalidArgument, "plan needs at least one method");
    for (int i : i_range) {
      if (i < 0 || i > 20) throw Error(ErrorKind::InvalidArgument, "gamble exponent out of range");
      if (i == 0 && truth != TruthSelection::Asl) {
        throw Error(ErrorKind::InvalidArgument, "sure-loss instances need at least two gambles (i >= 1)");
      }
    }
    for (int j : j_range) {
      if (j < 1 || j > 20) throw Error(ErrorKind::InvalidArgument, "outcome exponent must lie in [1, 20]");
    }
    for (const auto& m : methods) m.validate();
  }

  std::vector<GroundTruth> truths() const {
    switch (truth) {
      case TruthSelection::Asl: return {GroundTruth::Asl};
      case TruthSelection::NotAsl: return {GroundTruth::NotAsl};
      case TruthSelection::Both: return {GroundTruth::Asl, GroundTruth::NotAsl};
    }
    return {};
  }
};

inline std::vector<MethodChoice> table_methods() {
  std::vector<MethodChoice> out;
  for (const auto& [m, f] : kMethodPairs) out.push_back(MethodChoice::make(m, f));
  return out;
}

inline std::vector<int> exponent_range(int lo, int hi) {
  std::vector<int> r;
  for (int v = lo; v <= hi; ++v) r.push_back(v);
  return r;
}

/// i, j in {1..6}, 50 repetitions.
inline BenchPlan desk_plan(std::uint64_t seed = 1) {
  return BenchPlan{exponent_range(1, 6), exponent_range(1, 6), 50, TruthSelection::Both, table_methods(), seed};
}

/// i, j in {1..8}, 1000 repetitions. Expect hours.
inline BenchPlan full_plan(std::uint64_t seed = 1) {
  return BenchPlan{exponent_range(1, 8), exponent_range(1, 8), 1000, TruthSelection::Both, table_methods(), seed};
}

inline BenchPlan preset_plan(const std::string& name, std::uint64_t seed = 1) {
  if (name == "desk") return desk_plan(seed);
  if (name == "full") return full_plan(seed);
  throw Error(ErrorKind::InvalidArgument, "unknown preset '" + name + "' (expected desk or full)");
}

struct BenchRecord {
  std::string method;
  std::string formulation;
  std::size_t n_gambles = 0;
  std::size_t n_outcomes = 0;
  std::string ground_truth;
  int rep_index = 0;
  std::uint64_t seed = 0;
  std::string verdict;
  bool agree_with_truth = false;
  std::int64_t wall_time_ns = 0;
  int iterations = 0;
  std::string status;
};

inline constexpr const char* kRecordHeader =
    "method,formulation,n_gambles,n_outcomes,ground_truth,rep_index,seed,verdict,agree_with_truth,wall_time_ns,"
    "iterations,status";

inline void write_record(std::ostream& out, const BenchRecord& r) {
  out << r.method << ',' << r.formulation << ',' << r.n_gambles << ',' << r.n_outcomes << ',' << r.ground_truth << ','
      << r.rep_index << ',' << r.seed << ',' << r.verdict << ',' << (r.agree_with_truth ? "true" : "false") << ','
      << r.wall_time_ns << ',' << r.iterations << ',' << r.status << '\n';
}

inline const char* verdict_string(bool avoids) { return avoids ? "asl" : "not_asl"; }

/// Runs the check twice and keeps the timing and verdict of the second run. Solver errors are
/// reported through `status` ("error:<kind>") with an empty verdict.
inline BenchRecord time_check(const GambleSet& d, const MethodChoice& choice) {
  BenchRecord rec;
  rec.method = to_string(choice.method);
  rec.formulation = to_string(choice.formulation);
  rec.n_gambles = d.num_gambles();
  rec.n_outcomes = d.num_outcomes();
  try {
    const AslVerdict warm = avoids_sure_loss(d, choice);
    const detail::Stopwatch clock;
    const AslVerdict timed = avoids_sure_loss(d, choice);
    rec.wall_time_ns = std::max<std::int64_t>(1, clock.elapsed_ns());
    if (warm.avoids != timed.avoids) throw Error(ErrorKind::CertificateFailure, "repeated runs disagree");
    rec.verdict = verdict_string(timed.avoids);
    rec.iterations = timed.diagnostics.iterations;
    rec.status = to_string(timed.diagnostics.status);
  } catch (const Error& e) {
    rec.verdict.clear();
    rec.status = std::string("error:") + to_string(e.kind());
  }
  return rec;
}

/// Seed of the instance in cell (n, m, truth) at repetition rep; `gen --seed` with the same
/// sizes reproduces it.
inline std::uint64_t instance_seed(std::uint64_t plan_seed, std::size_t n, std::size_t m, GroundTruth truth, int rep) {
  std::uint64_t h = hash_combine(plan_seed, n);
  h = hash_combine(h, m);
  h = hash_combine(h, truth == GroundTruth::Asl ? 1 : 2);
  return hash_combine(h, static_cast<std::uint64_t>(rep));
}

inline GambleSet bench_instance(std::uint64_t seed, std::size_t n, std::size_t m, GroundTruth truth,
                                std::size_t k = 32, double delta = 0.05, Bias bias = Bias::None) {
  GenSpec spec;
  spec.n_outcomes = m;
  spec.n_gambles = n;
  spec.k_previsions = k;
  spec.delta = delta;
  spec.bias = bias;
  return generate_instance(RngStream(seed, 0), spec, truth);
}

struct CellStats {
  std::string method;
  std::string formulation;
  std::size_t n_gambles = 0;
  std::size_t n_outcomes = 0;
  std::string ground_truth;
  int count = 0;
  double mean_ns = 0.0;
  double sd_ns = 0.0;
  /// Half-width of the approximate 95% interval: 1.96 sd / sqrt(count).
  double ci95_ns = 0.0;

  std::string series() const { return method + "/" + formulation; }
};

/// Mean, sample standard deviation and CI half-width of the wall times per
/// (method, formulation, n_gambles, n_outcomes, ground_truth).
inline std::vector<CellStats> summarize(const std::vector<BenchRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::size_t, std::size_t, std::string>;
  std::map<Key, std::vector<double>> groups;
  std::vector<Key> order;
  for (const auto& r : records) {
    Key key{r.method, r.formulation, r.n_gambles, r.n_outcomes, r.ground_truth};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(static_cast<double>(r.wall_time_ns));
  }
  std::vector<CellStats> out;
  for (const auto& key : order) {
    const auto& times = groups.at(key);
    CellStats c{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), std::get<4>(key)};
    c.count = static_cast<int>(times.size());
    double sum = 0.0;
    for (double t : times) sum += t;
    c.mean_ns = sum / c.count;
    double ss = 0.0;
    for (double t : times) ss += (t - c.mean_ns) * (t - c.mean_ns);
    c.sd_ns = c.count > 1 ? std::sqrt(ss / (c.count - 1)) : 0.0;
    c.ci95_ns = 1.96 * c.sd_ns / std::sqrt(static_cast<double>(c.count));
    out.push_back(std::move(c));
  }
  return out;
}

inline void write_summary(std::ostream& out, const std::vector<CellStats>& cells) {
  out << "method,formulation,n_gambles,n_outcomes,ground_truth,reps,mean_ns,sd_ns,ci95_ns\n";
  out << std::setprecision(12);
  for (const auto& c : cells) {
    out << c.method << ',' << c.formulation << ',' << c.n_gambles << ',' << c.n_outcomes << ',' << c.ground_truth << ','
        << c.count << ',' << c.mean_ns << ',' << c.sd_ns << ',' << c.ci95_ns << '\n';
  }
}

/// Thrown when a verdict disagrees with the generator's ground truth or a solver fails.
class BenchAbort : public Error {
 public:
  BenchAbort(const std::string& what, BenchRecord record)
      : Error(ErrorKind::CertificateFailure, what), record_(std::move(record)) {}
  const BenchRecord& record() const noexcept { return record_; }

 private:
  BenchRecord record_;
};

struct BenchSummary {
  std::vector<BenchRecord> records;
  std::vector<CellStats> cells;
  std::filesystem::path records_csv;
  std::filesystem::path summary_csv;
};

/// Runs every method of the plan on every generated instance, cell by cell and sequentially.
/// Writes records.csv and summary.csv to out_dir (an empty path skips file output).
inline BenchSummary run_grid(const BenchPlan& plan, const std::filesystem::path& out_dir, std::ostream* progress = nullptr) {
  plan.validate();
  BenchSummary summary;
  std::ofstream records_file;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    summary.records_csv = out_dir / "records.csv";
    summary.summary_csv = out_dir / "summary.csv";
    records_file.open(summary.records_csv);
    if (!records_file) throw Error(ErrorKind::InvalidArgument, "cannot write " + summary.records_csv.string());
    records_file << kRecordHeader << '\n';
  }

  for (int i : plan.i_range) {
    const std::size_t n = std::size_t{1} << i;
    for (int j : plan.j_range) {
      const std::size_t m = std::size_t{1} << j;
      for (GroundTruth truth : plan.truths()) {
        if (progress != nullptr) *progress << "cell |D|=" << n << " |Omega|=" << m << ' ' << to_string(truth) << std::endl;
        for (int rep = 0; rep < plan.reps; ++rep) {
          const std::uint64_t seed = instance_seed(plan.seed, n, m, truth, rep);
          const GambleSet d = bench_instance(seed, n, m, truth, plan.k_previsions, plan.delta, plan.bias);
          for (const auto& choice : plan.methods) {
            BenchRecord rec = time_check(d, choice);
            rec.ground_truth = to_string(truth);
            rec.rep_index = rep;
            rec.seed = seed;
            rec.agree_with_truth = rec.verdict == to_string(truth);
            summary.records.push_back(rec);
            if (records_file.is_open()) write_record(records_file, rec);
            if (!rec.agree_with_truth) {
              if (records_file.is_open()) records_file.flush();
              std::ostringstream msg;
              msg << choice.label() << " returned '" << rec.verdict << "' (status " << rec.status << ") on a "
                  << to_string(truth) << " instance: |D|=" << n << " |Omega|=" << m << " rep=" << rep
                  << " seed=" << seed;
              throw BenchAbort(msg.str(), rec);
            }
          }
        }
      }
    }
  }
  summary.cells = summarize(summary.records);
  if (!out_dir.empty()) {
    std::ofstream summary_file(summary.summary_csv);
    write_summary(summary_file, summary.cells);
  }
  return summary;
}

inline std::vector<BenchRecord> read_records(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw Error(ErrorKind::Parse, "cannot read " + csv.string());
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader) throw Error(ErrorKind::Parse, csv.string() + ": unexpected header");
  std::vector<BenchRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 12) throw Error(ErrorKind::Parse, csv.string() + ":" + std::to_string(line_no) + ": expected 12 fields");
    try {
      BenchRecord r;
      r.method = f[0];
      r.formulation = f[1];
      r.n_gambles = std::stoull(f[2]);
      r.n_outcomes = std::stoull(f[3]);
      r.ground_truth = f[4];
      r.rep_index = std::stoi(f[5]);
      r.seed = std::stoull(f[6]);
      r.verdict = f[7];
      r.agree_with_truth = f[8] == "true";
      r.wall_time_ns = std::stoll(f[9]);
      r.iterations = std::stoi(f[10]);
      r.status = f[11];
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Parse, csv.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  if (out.empty()) throw Error(ErrorKind::Parse, csv.string() + ": no records");
  return out;
}

namespace detail {

struct PlotSeries {
  std::string label;
  std::vector<const CellStats*> points;  // sorted by x
};

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

/// Mean time (ms, log scale) against a size (log2 scale) with 95% interval bars.
inline void write_svg(const std::filesystem::path& file, const std::string& title, const std::string& x_label,
                      const std::vector<PlotSeries>& series, bool x_is_gambles) {
  constexpr double kW = 720, kH = 460, kLeft = 80, kRight = 200, kTop = 40, kBottom = 60;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  auto x_of = [&](const CellStats& c) { return std::log2(static_cast<double>(x_is_gambles ? c.n_gambles : c.n_outcomes)); };
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (const auto* c : s.points) {
      xmin = std::min(xmin, x_of(*c));
      xmax = std::max(xmax, x_of(*c));
      const double lo = std::max(c->mean_ns - c->ci95_ns, c->mean_ns * 0.5);
      ymin = std::min(ymin, std::log10(std::max(lo, 1.0) / 1e6));
      ymax = std::max(ymax, std::log10((c->mean_ns + c->ci95_ns) / 1e6));
    }
  }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax == ymin) ymax = ymin + 1;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ms) { return kTop + (ymax - std::log10(ms)) / (ymax - ymin) * ph; };

  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + file.string());
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << svg_escape(title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e) {
    out << "<line x1=\"" << px(e) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(e) << "\" y2=\"" << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(e) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << (1LL << e) << "</text>\n";
  }
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
    const double y = py(std::pow(10.0, e));
    out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + pw << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">" << svg_escape(x_label) << " (log2 scale)</text>\n";
  out << "<text transform=\"translate(20," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">mean time [ms] (log10 scale)</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    const auto& s = series[k];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto* c : s.points) out << px(x_of(*c)) << ',' << py(c->mean_ns / 1e6) << ' ';
    out << "\"/>\n";
    for (const auto* c : s.points) {
      const double x = px(x_of(*c));
      const double lo = std::max(c->mean_ns - c->ci95_ns, c->mean_ns * 0.5) / 1e6;
      const double hi = (c->mean_ns + c->ci95_ns) / 1e6;
      out << "<line x1=\"" << x << "\" y1=\"" << py(lo) << "\" x2=\"" << x << "\" y2=\"" << py(hi) << "\" stroke=\"" << color << "\"/>\n";
      out << "<circle cx=\"" << x << "\" cy=\"" << py(c->mean_ns / 1e6) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 16 + 18 * static_cast<double>(k);
    out << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly << "\">" << svg_escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace detail

/// One SVG per (fixed |D|, truth) against |Omega| and one per (fixed |Omega|, truth) against |D|,
/// each with one series per (method, formulation). Returns the written files.
inline std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& csv, const std::filesystem::path& out_dir) {
  const auto cells = summarize(read_records(csv));
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> files;

  for (bool fix_gambles : {true, false}) {
    std::map<std::pair<std::size_t, std::string>, std::vector<const CellStats*>> panels;
    for (const auto& c : cells) panels[{fix_gambles ? c.n_gambles : c.n_outcomes, c.ground_truth}].push_back(&c);
    for (auto& [key, members] : panels) {
      std::map<std::string, detail::PlotSeries> by_series;
      std::vector<std::string> order;
      for (const auto* c : members) {
        auto [it, inserted] = by_series.try_emplace(c->series());
        if (inserted) {
          it->second.label = c->series();
          order.push_back(c->series());
        }
        it->second.points.push_back(c);
      }
      std::vector<detail::PlotSeries> series;
      for (const auto& name : order) {
        auto s = by_series.at(name);
        std::sort(s.points.begin(), s.points.end(), [&](const CellStats* a, const CellStats* b) {
          return fix_gambles ? a->n_outcomes < b->n_outcomes : a->n_gambles < b->n_gambles;
        });
        series.push_back(std::move(s));
      }
      const std::string fixed = fix_gambles ? "gambles" : "outcomes";
      const auto name = "time_" + key.second + "_" + fixed + "_" + std::to_string(key.first) + ".svg";
      const std::string title = std::string(key.second == "asl" ? "avoiding sure loss" : "not avoiding sure loss") + ", " +
                                (fix_gambles ? "|D| = " : "|Omega| = ") + std::to_string(key.first);
      detail::write_svg(out_dir / name, title, fix_gambles ? "|Omega|" : "|D|", series, !fix_gambles);
      files.push_back(out_dir / name);
    }
  }
  return files;
}

}  // namespace aslcheck
