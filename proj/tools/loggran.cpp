// loggran: command-line front end for log-activity anomaly classification.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error,
// 4 more than half of the log lines had no parseable timestamp.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "loggran/loggran.hpp"

namespace {

using namespace loggran;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitParseThreshold = 4;
constexpr double kMaxParseErrorRatio = 0.5;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseThresholdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string profile;
  std::uint64_t seed = 1;
  std::string out;
  std::string truth;
};

SynthProfile load_profile(const std::string& path) {
  if (path.empty()) return benchmark_profile();
  auto in = open_in(path);
  return parse_profile(in);
}

void cmd_synth(const SynthArgs& a) {
  const SynthProfile p = load_profile(a.profile);
  const auto ts = synth(p, a.seed);
  auto out = open_out(a.out);
  write_log(out, ts);
  finish(out, a.out);
  const std::string truth_path = a.truth.empty() ? a.out + ".truth.csv" : a.truth;
  auto truth = open_out(truth_path);
  write_truth(truth, p);
  finish(truth, truth_path);
  std::cerr << "wrote " << ts.size() << " lines to " << a.out << "\n";
}

// ---------------------------------------------------------------------------

struct LogArgs {
  std::string log;
  std::string pattern = "iso";
  int year = 1970;
  std::int64_t bin_ms = Binner::kDefaultBinMs;
  std::int64_t sub_window_s = 60;
  std::int64_t lateness_ms = Binner::kDefaultLatenessMs;
  std::int64_t span_start_ms = 0;
  std::int64_t span_end_ms = 0;
  std::string label_mode = "batch";

  void add_to(CLI::App* app) {
    app->add_option("--pattern", pattern, "timestamp pattern: iso, iso-space, syslog or a %-format")
        ->capture_default_str();
    app->add_option("--year", year, "year for patterns without one")->capture_default_str();
    app->add_option("--bin-ms", bin_ms, "activity bin length (ms)")->capture_default_str();
    app->add_option("--sub-window-s", sub_window_s, "sub-window length (s)")->capture_default_str();
    app->add_option("--lateness-ms", lateness_ms, "accepted record lateness (ms)")->capture_default_str();
    app->add_option("--span-start-ms", span_start_ms, "log span start (epoch ms), keeps silent edges");
    app->add_option("--span-end-ms", span_end_ms, "log span end (epoch ms, exclusive)");
    app->add_option("--label-mode", label_mode, "control chart mode: batch or online")->capture_default_str();
  }
};

BinSeries read_bins(const LogArgs& a) {
  const TimestampPattern pattern = TimestampPattern::named(a.pattern, a.year);
  auto in = open_in(a.log);
  Binner binner(a.bin_ms, a.lateness_ms);
  if (a.span_end_ms > a.span_start_ms) binner.cover(a.span_start_ms, a.span_end_ms);
  IngestStats stats;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++stats.lines;
    if (auto ts = parse_timestamp(line, pattern)) {
      binner.add(*ts);
    } else {
      ++stats.parse_errors;
    }
  }
  stats.dropped_late = binner.dropped();
  std::cerr << a.log << ": " << stats.lines << " lines, " << stats.parse_errors << " unparseable, "
            << stats.dropped_late << " dropped late\n";
  if (stats.parse_error_ratio() > kMaxParseErrorRatio) {
    throw ParseThresholdError("more than half of the lines have no parseable timestamp");
  }
  return binner.series();
}

DatasetOptions dataset_options(const LogArgs& a, int window_minutes) {
  DatasetOptions opt;
  opt.window_minutes = window_minutes;
  opt.label_mode = parse_label_mode(a.label_mode);
  opt.sub_window_ms = a.sub_window_s * 1000;
  return opt;
}

struct DatasetArgs {
  LogArgs log;
  int window_minutes = 60;
  std::string out;
  std::string bins_out;
};

void cmd_dataset(const DatasetArgs& a) {
  const BinSeries bins = read_bins(a.log);
  if (!a.bins_out.empty()) {
    auto out = open_out(a.bins_out);
    write_bins(out, bins);
    finish(out, a.bins_out);
  }
  const auto data = build_dataset(bins, dataset_options(a.log, a.window_minutes));
  auto out = open_out(a.out);
  write_dataset(out, data);
  finish(out, a.out);
  std::cerr << "wrote " << data.size() << " instances to " << a.out << "\n";
}

// ---------------------------------------------------------------------------

struct ModelArgs {
  std::string classifier = "fbem";
  double rho0 = 0.5;
  std::uint64_t h_r = 100;
  double eta = 3.0;

  void add_to(CLI::App* app) {
    app->add_option("--classifier", classifier, "fbem or egnn")->capture_default_str();
    app->add_option("--rho0", rho0, "initial granularity")->capture_default_str();
    app->add_option("--h-r", h_r, "granularity adaptation period (steps)")->capture_default_str();
    app->add_option("--eta", eta, "reference rule growth per period")->capture_default_str();
  }
};

std::vector<LabeledInstance> read_dataset_file(const std::string& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

struct TrainArgs {
  ModelArgs model;
  std::string data;
  std::string aggregation = "min";
  std::string out;
  std::string predictions;
};

void cmd_train(const TrainArgs& a) {
  const ClassifierKind kind = parse_classifier(a.model.classifier);
  if (a.aggregation != "min" && a.aggregation != "product") throw ConfigError("aggregation must be min or product");
  make_granularity(a.model.rho0, a.model.h_r, a.model.eta);
  const auto data = read_dataset_file(a.data);

  std::ofstream pred;
  if (!a.predictions.empty()) {
    pred = open_out(a.predictions);
    pred << "step,label,estimate,rules\n";
  }
  EvalState st;
  auto drive = [&](auto& model) {
    for (const auto& inst : data) {
      const StepResult r = timed(st, [&] { return model.learn_step(inst.x, inst.label); });
      st.record(r.label, r.estimate, model.size());
      if (pred.is_open()) pred << st.step << ',' << r.label << ',' << r.estimate << ',' << model.size() << '\n';
    }
    if (!a.out.empty()) {
      auto out = open_out(a.out);
      save(out, model);
      finish(out, a.out);
    }
  };
  if (kind == ClassifierKind::kFbem) {
    FbemModel m(FbemConfig{a.model.rho0, a.model.h_r, a.model.eta});
    drive(m);
  } else {
    EgnnConfig cfg{a.model.rho0, a.model.h_r, a.model.eta};
    cfg.aggregation = a.aggregation == "min" ? AggregationKind::kMin : AggregationKind::kProduct;
    EgnnModel m(cfg);
    drive(m);
  }
  if (pred.is_open()) finish(pred, a.predictions);
  std::cout << "instances," << st.step << "\naccuracy," << detail::fixed(100.0 * st.accuracy, 4) << "\navg_rules,"
            << detail::fixed(st.avg_rules, 4) << "\ntime_s," << detail::fixed(st.elapsed_s, 6) << '\n';
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  ModelArgs model;
  LogArgs log;
  std::string data;
  bool synthetic = false;
  std::string profile;
  std::uint64_t synth_seed = 1;
  std::vector<int> windows{5, 15, 30, 60};
  int window_minutes = 0;
  int runs = 5;
  std::uint64_t seed = 1;
  double confidence = 0.99;
  bool no_timing = false;
  std::string out;
  std::string confusion;
  // sweep only
  std::vector<double> rho0_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  std::vector<std::uint64_t> h_r_grid{75, 100, 125};

  void add_to(CLI::App* app) {
    model.add_to(app);
    log.add_to(app);
    app->add_option("--data", data, "labeled dataset CSV");
    app->add_option("--log", log.log, "raw log file; datasets are built per window length");
    app->add_flag("--synth", synthetic, "generate the log in memory from --profile (built-in when omitted)");
    app->add_option("--profile", profile, "synthetic profile file");
    app->add_option("--synth-seed", synth_seed, "seed of the synthetic log")->capture_default_str();
    app->add_option("--windows", windows, "window lengths (min) for --log/--synth")->delimiter(',');
    app->add_option("--window-minutes", window_minutes, "window length label for --data, or a single window");
    app->add_option("--runs", runs, "shuffled runs per window")->capture_default_str();
    app->add_option("--seed", seed, "master shuffle seed")->capture_default_str();
    app->add_option("--confidence", confidence, "confidence level of the intervals")->capture_default_str();
    app->add_option("--out", out, "CSV output (stdout when omitted)");
  }

  ExperimentConfig config(int window) const {
    ExperimentConfig c;
    c.classifier = parse_classifier(model.classifier);
    c.window_minutes = window;
    c.rho0 = model.rho0;
    c.h_r = model.h_r;
    c.eta = model.eta;
    c.runs = runs;
    c.seed = seed;
    c.label_mode = parse_label_mode(log.label_mode);
    c.confidence = confidence;
    c.timing = !no_timing;
    c.validate();
    return c;
  }

  /// (window, dataset) pairs for the selected source.
  std::vector<std::pair<int, std::vector<LabeledInstance>>> datasets() const {
    const int sources = (!data.empty()) + (!log.log.empty()) + (synthetic ? 1 : 0);
    if (sources != 1) throw ConfigError("choose exactly one of --data, --log, --synth");
    std::vector<std::pair<int, std::vector<LabeledInstance>>> out;
    if (!data.empty()) {
      out.emplace_back(window_minutes > 0 ? window_minutes : 60, read_dataset_file(data));
      return out;
    }
    std::vector<int> ws = window_minutes > 0 ? std::vector<int>{window_minutes} : windows;
    if (ws.empty()) throw ConfigError("no window lengths given");
    if (synthetic) {
      const SynthProfile p = load_profile(profile);
      const auto ts = synth(p, synth_seed);
      const BinSeries bins = bin_span(ts, p.start_ms, p.start_ms + p.duration_s * 1000, log.bin_ms, log.lateness_ms);
      for (int w : ws) out.emplace_back(w, build_dataset(bins, dataset_options(log, w)));
      return out;
    }
    const BinSeries bins = read_bins(log);
    for (int w : ws) out.emplace_back(w, build_dataset(bins, dataset_options(log, w)));
    return out;
  }
};

template <class Write>
void emit(const std::string& path, Write&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  auto out = open_out(path);
  write(out);
  finish(out, path);
}

void cmd_bench(const BenchArgs& a) {
  a.config(1);
  std::vector<BenchResult> results;
  for (auto& [w, data] : a.datasets()) {
    if (data.empty()) throw ConfigError("window " + std::to_string(w) + " min produced no instances");
    results.push_back(bench(a.config(w), data));
  }
  emit(a.out, [&](std::ostream& os) { write_report_csv(os, results); });
  if (!a.confusion.empty()) {
    emit(a.confusion, [&](std::ostream& os) {
      os << kConfusionHeader << '\n';
      for (const auto& r : results) write_confusion_rows(os, r);
    });
  }
  write_report_table(a.out.empty() ? std::cerr : std::cout, results);
}

void cmd_sweep(const BenchArgs& a) {
  a.config(1);
  if (a.rho0_grid.empty() || a.h_r_grid.empty()) throw ConfigError("sweep grids must not be empty");
  for (double r : a.rho0_grid) make_granularity(r, a.model.h_r, a.model.eta);
  for (std::uint64_t h : a.h_r_grid) make_granularity(a.model.rho0, h, a.model.eta);
  std::ostringstream rows;
  rows << kSweepHeader << '\n';
  for (auto& [w, data] : a.datasets()) {
    if (data.empty()) throw ConfigError("window " + std::to_string(w) + " min produced no instances");
    const ExperimentConfig cfg = a.config(w);
    const auto pts = sweep(cfg, data, a.rho0_grid, a.h_r_grid);
    write_sweep_rows(rows, cfg, pts);
  }
  emit(a.out, [&](std::ostream& os) { os << rows.str(); });
}

/// Splices `--config FILE` entries into the argument list of the chosen
/// subcommand. Keys given explicitly on the command line win.
std::vector<std::string> expand_config(const CLI::App& app, int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) return args;
  const CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args.front());
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::string path;
  std::vector<std::string> rest{args.front()};
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;

  auto given = [&](const std::string& flag) {
    for (std::size_t i = 1; i < rest.size(); ++i) {
      if (rest[i] == flag || rest[i].rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };

  auto in = open_in(path);
  std::vector<std::string> spliced{rest.front()};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) continue;
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string value = detail::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr || key == "config") throw ConfigError(path + ": unknown key '" + key + "'");
    if (given(flag)) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1") {
        spliced.push_back(flag);
      } else if (value != "false" && value != "0") {
        throw ConfigError(path + ": '" + key + "' expects true or false");
      }
    } else {
      spliced.push_back(flag);
      spliced.push_back(value);
    }
  }
  spliced.insert(spliced.end(), rest.begin() + 1, rest.end());
  return spliced;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolving granular classifiers for log-activity anomaly detection", "loggran"};
  app.require_subcommand(1);
  std::string config_path;

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic log and its episode ground truth");
  synth_cmd->add_option("--config", config_path, "file of key = value lines; flags override it");
  synth_cmd->add_option("--profile", synth_args.profile, "profile file (built-in benchmark profile when omitted)");
  synth_cmd->add_option("--seed", synth_args.seed, "generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth_args.out, "log file to write")->required();
  synth_cmd->add_option("--truth", synth_args.truth, "ground-truth CSV (default <out>.truth.csv)");

  DatasetArgs dataset_args;
  auto* dataset_cmd = app.add_subcommand("dataset", "build a labeled feature dataset from a log");
  dataset_cmd->add_option("--config", config_path, "file of key = value lines; flags override it");
  dataset_cmd->add_option("--log", dataset_args.log.log, "log file")->required();
  dataset_args.log.add_to(dataset_cmd);
  dataset_cmd->add_option("--window-minutes", dataset_args.window_minutes, "instance window (min)")
      ->capture_default_str();
  dataset_cmd->add_option("--out", dataset_args.out, "dataset CSV to write")->required();
  dataset_cmd->add_option("--bins-out", dataset_args.bins_out, "activity bin counts CSV");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "stream a dataset once and save the model");
  train_cmd->add_option("--config", config_path, "file of key = value lines; flags override it");
  train_args.model.add_to(train_cmd);
  train_cmd->add_option("--data", train_args.data, "labeled dataset CSV")->required();
  train_cmd->add_option("--aggregation", train_args.aggregation, "egnn aggregation neuron: min or product")
      ->capture_default_str();
  train_cmd->add_option("--out", train_args.out, "checkpoint file");
  train_cmd->add_option("--predictions", train_args.predictions, "per-step predictions CSV");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "multi-run prequential benchmark per window length");
  bench_cmd->add_option("--config", config_path, "file of key = value lines; flags override it");
  bench_args.add_to(bench_cmd);
  bench_cmd->add_option("--confusion", bench_args.confusion, "confusion matrices CSV (summed over runs)");
  bench_cmd->add_flag("--no-timing", bench_args.no_timing, "report zero time so reports are reproducible");

  BenchArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "accuracy versus rule count over a rho0 x h_r grid");
  sweep_cmd->add_option("--config", config_path, "file of key = value lines; flags override it");
  sweep_args.add_to(sweep_cmd);
  sweep_cmd->add_option("--rho0-grid", sweep_args.rho0_grid, "initial granularities")->delimiter(',');
  sweep_cmd->add_option("--h-r-grid", sweep_args.h_r_grid, "adaptation periods")->delimiter(',');

  std::vector<std::string> args;
  try {
    args = expand_config(app, argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }

  try {
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*synth_cmd) cmd_synth(synth_args);
    if (*dataset_cmd) cmd_dataset(dataset_args);
    if (*train_cmd) cmd_train(train_args);
    if (*bench_cmd) cmd_bench(bench_args);
    if (*sweep_cmd) cmd_sweep(sweep_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseThresholdError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParseThreshold;
  }
  return 0;
}
