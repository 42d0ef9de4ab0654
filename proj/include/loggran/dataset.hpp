#pragma once

// Labeled instance streams and their CSV form:
//   x1,x2,x3,x4,x5,label
// one instance per row, '.' decimal point, LF line endings.

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "loggran/control_chart.hpp"
#include "loggran/features.hpp"
#include "loggran/ingest.hpp"
#include "loggran/types.hpp"

namespace loggran {

struct LabeledInstance {
  Vec x{};
  int label = 1;

  bool operator==(const LabeledInstance&) const = default;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kDatasetHeader = "x1,x2,x3,x4,x5,label";

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("not a number: " + std::string(s));
  return v;
}

inline void write_dataset(std::ostream& os, std::span<const LabeledInstance> data) {
  os << kDatasetHeader << '\n';
  for (const auto& d : data) {
    for (double v : d.x) os << format_double(v) << ',';
    os << d.label << '\n';
  }
}

inline std::vector<LabeledInstance> read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("dataset: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDatasetHeader) throw FormatError("dataset: unexpected header: " + line);
  std::vector<LabeledInstance> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
      cells.push_back(rest.substr(0, pos));
    }
    cells.push_back(rest);
    if (cells.size() != kNumAttributes + 1) throw FormatError("dataset: row " + std::to_string(row) + " has wrong arity");
    LabeledInstance d;
    for (std::size_t j = 0; j < kNumAttributes; ++j) d.x[j] = parse_double(cells[j]);
    const std::string_view lab = cells.back();
    const auto [ptr, ec] = std::from_chars(lab.data(), lab.data() + lab.size(), d.label);
    if (ec != std::errc() || ptr != lab.data() + lab.size() || !is_valid_class(d.label)) {
      throw FormatError("dataset: row " + std::to_string(row) + " has invalid label");
    }
    out.push_back(d);
  }
  return out;
}

struct DatasetOptions {
  int window_minutes = 60;
  LabelMode label_mode = LabelMode::kBatch;
  std::int64_t sub_window_ms = 60'000;
  std::uint64_t online_warmup = ControlChart::kDefaultWarmup;
};

/// Bins -> sub-window means -> instance features -> control-chart labels on x1.
inline std::vector<LabeledInstance> build_dataset(const BinSeries& bins, const DatasetOptions& opt) {
  if (opt.window_minutes <= 0) throw ConfigError("window length must be positive");
  const auto windows = sub_windows(bins, opt.sub_window_ms);
  const auto instances =
      windows_to_instances(windows, static_cast<std::int64_t>(opt.window_minutes) * 60'000, opt.sub_window_ms);
  std::vector<double> means;
  means.reserve(instances.size());
  for (const auto& inst : instances) means.push_back(inst.features.mean);
  const std::vector<int> labels =
      opt.label_mode == LabelMode::kBatch ? label_batch(means) : label_online(means, opt.online_warmup);
  std::vector<LabeledInstance> out;
  out.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) out.push_back({instances[i].features.to_vec(), labels[i]});
  return out;
}

}  // namespace loggran
