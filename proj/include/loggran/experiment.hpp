#pragma once

// Benchmark harness: seeded shuffles of a labeled dataset streamed
// prequentially through either classifier, multi-run summaries, and the
// meta-parameter sweep.

#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "loggran/control_chart.hpp"
#include "loggran/dataset.hpp"
#include "loggran/egnn.hpp"
#include "loggran/eval.hpp"
#include "loggran/fbem.hpp"
#include "loggran/ingest.hpp"

namespace loggran {

enum class ClassifierKind { kFbem, kEgnn };

inline std::string to_string(ClassifierKind k) { return k == ClassifierKind::kFbem ? "fbem" : "egnn"; }

inline ClassifierKind parse_classifier(const std::string& s) {
  if (s == "fbem") return ClassifierKind::kFbem;
  if (s == "egnn") return ClassifierKind::kEgnn;
  throw ConfigError("unknown classifier: " + s);
}

inline LabelMode parse_label_mode(const std::string& s) {
  if (s == "batch") return LabelMode::kBatch;
  if (s == "online") return LabelMode::kOnline;
  throw ConfigError("unknown label mode: " + s);
}

struct ExperimentConfig {
  ClassifierKind classifier = ClassifierKind::kFbem;
  int window_minutes = 60;
  double rho0 = 0.5;
  std::uint64_t h_r = 100;
  double eta = 3.0;
  int runs = 5;
  std::uint64_t seed = 1;
  LabelMode label_mode = LabelMode::kBatch;
  double confidence = 0.99;
  bool timing = true;

  void validate() const {
    if (!(rho0 > 0.0 && rho0 <= 1.0)) throw ConfigError("rho0 must lie in (0, 1]");
    if (h_r == 0) throw ConfigError("h-r must be positive");
    if (!(eta > 0.0)) throw ConfigError("eta must be positive");
    if (runs < 2) throw ConfigError("runs must be at least 2");
    if (window_minutes <= 0) throw ConfigError("window length must be positive");
    if (!(confidence >= 0.0 && confidence < 1.0)) throw ConfigError("confidence must lie in [0, 1)");
  }
};

/// Independent per-run seed (splitmix64 of master seed and run index).
inline std::uint64_t run_seed(std::uint64_t master, std::uint64_t run) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (run + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Fisher-Yates shuffle driven by mt19937_64.
template <class T>
std::vector<T> shuffled(std::span<const T> data, std::uint64_t seed) {
  std::vector<T> out(data.begin(), data.end());
  std::mt19937_64 rng(seed);
  for (std::size_t i = out.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(out[i - 1], out[pick(rng)]);
  }
  return out;
}

/// Estimate-then-learn over the stream in the given order.
template <class Model>
EvalState run_prequential(Model& model, std::span<const LabeledInstance> stream, bool timing = true) {
  EvalState st;
  for (const auto& inst : stream) {
    auto step = [&] { return model.learn_step(inst.x, [&](int) { return inst.label; }); };
    const StepResult r = timing ? timed(st, step) : step();
    st.record(r.label, r.estimate, model.size());
  }
  return st;
}

inline EvalState run_prequential(const ExperimentConfig& cfg, std::span<const LabeledInstance> stream) {
  if (cfg.classifier == ClassifierKind::kFbem) {
    FbemModel m(FbemConfig{cfg.rho0, cfg.h_r, cfg.eta});
    return run_prequential(m, stream, cfg.timing);
  }
  EgnnModel m(EgnnConfig{cfg.rho0, cfg.h_r, cfg.eta});
  return run_prequential(m, stream, cfg.timing);
}

struct BenchResult {
  ExperimentConfig config;
  std::vector<EvalState> runs;
  EvalSummary summary;
  ConfusionMatrix confusion{};  // summed over runs
};

inline BenchResult bench(const ExperimentConfig& cfg, std::span<const LabeledInstance> data) {
  cfg.validate();
  if (data.empty()) throw ConfigError("bench: empty dataset");
  BenchResult res;
  res.config = cfg;
  for (int r = 0; r < cfg.runs; ++r) {
    const auto stream = shuffled(data, run_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    res.runs.push_back(run_prequential(cfg, stream));
    for (std::size_t a = 0; a < res.confusion.size(); ++a)
      for (std::size_t e = 0; e < res.confusion[a].size(); ++e) res.confusion[a][e] += res.runs.back().confusion[a][e];
  }
  res.summary = aggregate(res.runs, cfg.confidence);
  return res;
}

struct SweepPoint {
  double rho0 = 0.0;
  std::uint64_t h_r = 0;
  double avg_rules = 0.0;
  double accuracy = 0.0;
};

/// One averaged point per (rho0, h_r) cell.
inline std::vector<SweepPoint> sweep(ExperimentConfig cfg, std::span<const LabeledInstance> data,
                                     std::span<const double> rho0s, std::span<const std::uint64_t> h_rs) {
  std::vector<SweepPoint> out;
  cfg.timing = false;
  for (double rho0 : rho0s) {
    for (std::uint64_t h_r : h_rs) {
      cfg.rho0 = rho0;
      cfg.h_r = h_r;
      const BenchResult b = bench(cfg, data);
      out.push_back({rho0, h_r, b.summary.rules.mean, b.summary.accuracy.mean});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline constexpr std::string_view kReportHeader = "window_min,acc_mean,acc_ci,rules_mean,rules_ci,time_mean,time_ci";
inline constexpr std::string_view kSweepHeader = "classifier,window_min,rho0,h_r,avg_rules,accuracy";
inline constexpr std::string_view kConfusionHeader = "classifier,window_min,actual,est1,est2,est3,est4";

namespace detail {
inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}
}  // namespace detail

/// Accuracy is reported in percent, time in seconds per stream pass.
inline void write_report_row(std::ostream& os, const BenchResult& b) {
  const auto& s = b.summary;
  os << b.config.window_minutes << ',' << detail::fixed(100.0 * s.accuracy.mean, 4) << ','
     << detail::fixed(100.0 * s.accuracy.half_width, 4) << ',' << detail::fixed(s.rules.mean, 4) << ','
     << detail::fixed(s.rules.half_width, 4) << ',' << detail::fixed(s.time_s.mean, 6) << ','
     << detail::fixed(s.time_s.half_width, 6) << '\n';
}

inline void write_report_csv(std::ostream& os, std::span<const BenchResult> rows) {
  os << kReportHeader << '\n';
  for (const auto& b : rows) write_report_row(os, b);
}

inline void write_report_table(std::ostream& os, std::span<const BenchResult> rows) {
  if (rows.empty()) return;
  const auto& c = rows.front().config;
  os << to_string(c.classifier) << " (" << c.runs << " runs, " << detail::fixed(100.0 * c.confidence, 0)
     << "% confidence)\n";
  os << std::left << std::setw(12) << "window_min" << std::setw(20) << "acc(%)" << std::setw(20) << "rules"
     << "time(s)\n";
  for (const auto& b : rows) {
    const auto& s = b.summary;
    os << std::left << std::setw(12) << b.config.window_minutes << std::setw(20)
       << (detail::fixed(100.0 * s.accuracy.mean, 2) + " +- " + detail::fixed(100.0 * s.accuracy.half_width, 2))
       << std::setw(20) << (detail::fixed(s.rules.mean, 2) + " +- " + detail::fixed(s.rules.half_width, 2))
       << (detail::fixed(s.time_s.mean, 6) + " +- " + detail::fixed(s.time_s.half_width, 6)) << '\n';
  }
}

inline void write_confusion_rows(std::ostream& os, const BenchResult& b) {
  for (std::size_t a = 0; a < b.confusion.size(); ++a) {
    os << to_string(b.config.classifier) << ',' << b.config.window_minutes << ',' << a + 1;
    for (auto v : b.confusion[a]) os << ',' << v;
    os << '\n';
  }
}

inline void write_sweep_rows(std::ostream& os, const ExperimentConfig& cfg, std::span<const SweepPoint> pts) {
  for (const auto& p : pts) {
    os << to_string(cfg.classifier) << ',' << cfg.window_minutes << ',' << format_double(p.rho0) << ',' << p.h_r
       << ',' << detail::fixed(p.avg_rules, 4) << ',' << detail::fixed(100.0 * p.accuracy, 4) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Built-in synthetic benchmark: one day of bursty logs at a few lines per
// second with a one-hour outage and a one-hour doubled-rate episode.
// ---------------------------------------------------------------------------

inline SynthProfile benchmark_profile() {
  SynthProfile p;
  p.duration_s = 86400;
  p.base_rate = 5.0;
  p.jitter_sigma = 0.6;
  p.jitter_period_s = 60;
  p.episodes = {
      {5 * 3600, 3600, 0.0, 4},
      {15 * 3600, 3600, 2.0, 3},
  };
  return p;
}

inline std::vector<LabeledInstance> synthetic_dataset(const SynthProfile& profile, std::uint64_t seed,
                                                      const DatasetOptions& opt) {
  const auto ts = synth(profile, seed);
  return build_dataset(bin_span(ts, profile.start_ms, profile.start_ms + profile.duration_s * 1000), opt);
}

}  // namespace loggran
