#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "support.hpp"

namespace loggran {
namespace {

using testing::Gen;

std::vector<LabeledInstance> easy_dataset(std::size_t n) {
  Gen gen(81);
  std::vector<LabeledInstance> out(n);
  for (auto& d : out) {
    d.label = gen.integer(1, 4);
    for (auto& v : d.x) v = 10.0 * d.label + gen.normal(0, 0.5);
  }
  return out;
}

// Records the order in which the harness talks to the model.
struct SpyModel {
  std::vector<std::string>* log;
  std::size_t granules = 0;

  template <class LabelFn>
  StepResult learn_step(const Vec&, LabelFn&& label_of) {
    log->push_back("estimate");
    StepResult r;
    r.estimate = granules == 0 ? kNoEstimate : 1;
    r.label = label_of(r.estimate);
    log->push_back("label");
    log->push_back("learn");
    ++granules;
    return r;
  }
  std::size_t size() const { return granules; }
};

TEST(Prequential, EstimateBeforeLabelBeforeLearn) {
  std::vector<std::string> log;
  SpyModel spy{&log};
  const auto data = easy_dataset(5);
  const EvalState st = run_prequential(spy, data, false);
  ASSERT_EQ(log.size(), 15u);
  for (std::size_t i = 0; i < log.size(); i += 3) {
    EXPECT_EQ(log[i], "estimate");
    EXPECT_EQ(log[i + 1], "label");
    EXPECT_EQ(log[i + 2], "learn");
  }
  EXPECT_EQ(st.step, 5u);
  EXPECT_EQ(st.cold_starts, 1u);
  EXPECT_DOUBLE_EQ(st.avg_rules, (1 + 2 + 3 + 4 + 5) / 5.0);
}

TEST(Shuffle, DeterministicPermutation) {
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i;
  const auto a = shuffled<int>(v, 5), b = shuffled<int>(v, 5), c = shuffled<int>(v, 6);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, v);
}

TEST(Shuffle, RunSeedsAreDistinct) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t master : {0ULL, 1ULL, 2ULL}) {
    for (std::uint64_t r = 0; r < 100; ++r) seeds.insert(run_seed(master, r));
  }
  EXPECT_EQ(seeds.size(), 300u);
}

TEST(Bench, DeterministicReport) {
  const auto data = easy_dataset(300);
  for (auto kind : {ClassifierKind::kFbem, ClassifierKind::kEgnn}) {
    ExperimentConfig cfg;
    cfg.classifier = kind;
    cfg.timing = false;
    const std::vector<BenchResult> a{bench(cfg, data)}, b{bench(cfg, data)};
    std::ostringstream ra, rb;
    write_report_csv(ra, a);
    write_report_csv(rb, b);
    EXPECT_EQ(ra.str(), rb.str());
    EXPECT_EQ(a[0].runs.size(), 5u);
  }
}

TEST(Bench, FbemSeparatesDistantClasses) {
  ExperimentConfig cfg;
  cfg.timing = false;
  EXPECT_GT(bench(cfg, easy_dataset(300)).summary.accuracy.mean, 0.9);
}

TEST(Bench, ConfusionRowsAreWellFormed) {
  const auto data = easy_dataset(200);
  for (auto kind : {ClassifierKind::kFbem, ClassifierKind::kEgnn}) {
    ExperimentConfig cfg;
    cfg.classifier = kind;
    cfg.runs = 3;
    const BenchResult r = bench(cfg, data);
    std::uint64_t total = 0;
    for (const auto& row : r.confusion)
      for (auto v : row) total += v;
    EXPECT_EQ(total, 3u * (200u - 1u)) << "every step but the cold start";
    std::ostringstream os;
    write_confusion_rows(os, r);
    std::istringstream lines(os.str());
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
      ++n;
      EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
    }
    EXPECT_EQ(n, 4);
  }
}

TEST(Bench, ReportFormat) {
  BenchResult r;
  r.config.window_minutes = 15;
  r.summary.accuracy = {0.8564, 0.0369};
  r.summary.rules = {12.63, 3.44};
  r.summary.time_s = {0.18, 0.02};
  std::ostringstream os;
  write_report_csv(os, std::vector<BenchResult>{r});
  EXPECT_EQ(os.str(),
            "window_min,acc_mean,acc_ci,rules_mean,rules_ci,time_mean,time_ci\n"
            "15,85.6400,3.6900,12.6300,3.4400,0.180000,0.020000\n");
}

TEST(Sweep, OnePointPerCell) {
  const auto data = easy_dataset(150);
  ExperimentConfig cfg;
  cfg.runs = 2;
  const std::vector<double> rho0s{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  const std::vector<std::uint64_t> hrs{75, 100, 125};
  const auto pts = sweep(cfg, data, rho0s, hrs);
  ASSERT_EQ(pts.size(), 21u);
  std::ostringstream os;
  write_sweep_rows(os, cfg, pts);
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 21);
}

TEST(Config, Validation) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.runs = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.rho0 = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.confidence = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(parse_classifier("svm"), ConfigError);
  EXPECT_THROW(parse_label_mode("weekly"), ConfigError);
  EXPECT_EQ(parse_classifier("egnn"), ClassifierKind::kEgnn);
  EXPECT_EQ(parse_label_mode("online"), LabelMode::kOnline);
}

}  // namespace
}  // namespace loggran
