#pragma once

// Log ingestion: timestamp extraction from raw lines, bounded-lateness time
// binning into activity counts, and a seeded synthetic log generator.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "loggran/control_chart.hpp"
#include "loggran/features.hpp"
#include "loggran/types.hpp"

namespace loggran {

struct LogRecord {
  std::int64_t timestamp_ms = 0;
  std::string raw_line;
};

// ---------------------------------------------------------------------------
// Timestamp patterns
//
//   %Y  four-digit year          %m  two-digit month      %d  two-digit day
//   %e  day, one or two digits, optionally space padded
//   %b  English month abbreviation (Jan .. Dec)
//   %H  %M  %S  two-digit hour, minute, second
//   %f  optional fraction: '.' or ',' then digits (kept to milliseconds)
//   %z  optional zone: 'Z', +HH:MM, +HHMM, -HH:MM, -HHMM
//   %%  literal '%'
//   ' ' one or more spaces; any other character matches itself.
//
// Matching starts at the first non-blank character of the line. Patterns
// without %Y take the year from `default_year`. Times without a zone are UTC.
// ---------------------------------------------------------------------------

struct TimestampPattern {
  std::string format = "%Y-%m-%dT%H:%M:%S%f%z";
  int default_year = 1970;

  static TimestampPattern iso() { return {}; }
  static TimestampPattern iso_space() { return {"%Y-%m-%d %H:%M:%S%f%z", 1970}; }
  static TimestampPattern syslog(int year) { return {"%b %e %H:%M:%S", year}; }

  /// Resolves a preset name ("iso", "iso-space", "syslog") or a raw format.
  static TimestampPattern named(const std::string& name, int year) {
    if (name == "iso") return iso();
    if (name == "iso-space") return iso_space();
    if (name == "syslog") return syslog(year);
    if (name.find('%') == std::string::npos) throw ConfigError("unknown timestamp pattern: " + name);
    return {name, year};
  }
};

namespace detail {

inline bool read_digits(std::string_view s, std::size_t& pos, int count, int& out) {
  if (pos + static_cast<std::size_t>(count) > s.size()) return false;
  int v = 0;
  for (int i = 0; i < count; ++i) {
    const char c = s[pos + static_cast<std::size_t>(i)];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += static_cast<std::size_t>(count);
  out = v;
  return true;
}

inline int month_from_abbrev(std::string_view s) {
  static constexpr std::string_view kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  for (int i = 0; i < 12; ++i) {
    if (s == kMonths[i]) return i + 1;
  }
  return 0;
}

inline std::optional<std::int64_t> to_epoch_ms(int y, int mo, int d, int h, int mi, int sec, int ms,
                                               int tz_offset_min) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const auto days_since = sys_days{ymd}.time_since_epoch().count();
  std::int64_t t = static_cast<std::int64_t>(days_since) * 86'400'000LL;
  t += (static_cast<std::int64_t>(h) * 3600 + mi * 60 + sec) * 1000LL + ms;
  t -= static_cast<std::int64_t>(tz_offset_min) * 60'000LL;
  return t;
}

}  // namespace detail

/// Extracts the timestamp at the start of `line`, nullopt when it does not match.
inline std::optional<std::int64_t> parse_timestamp(std::string_view line, const TimestampPattern& pattern) {
  std::size_t pos = line.find_first_not_of(" \t");
  if (pos == std::string_view::npos) return std::nullopt;
  int y = pattern.default_year, mo = 1, d = 1, h = 0, mi = 0, sec = 0, ms = 0, tz = 0;
  const std::string& f = pattern.format;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const char pc = f[i];
    if (pc == ' ') {
      if (pos >= line.size() || line[pos] != ' ') return std::nullopt;
      while (pos < line.size() && line[pos] == ' ') ++pos;
      continue;
    }
    if (pc != '%' || i + 1 >= f.size()) {
      if (pos >= line.size() || line[pos] != pc) return std::nullopt;
      ++pos;
      continue;
    }
    const char directive = f[++i];
    bool ok = true;
    switch (directive) {
      case 'Y': ok = detail::read_digits(line, pos, 4, y); break;
      case 'm': ok = detail::read_digits(line, pos, 2, mo); break;
      case 'd': ok = detail::read_digits(line, pos, 2, d); break;
      case 'H': ok = detail::read_digits(line, pos, 2, h); break;
      case 'M': ok = detail::read_digits(line, pos, 2, mi); break;
      case 'S': ok = detail::read_digits(line, pos, 2, sec); break;
      case 'e': {
        if (pos < line.size() && line[pos] == ' ') ++pos;
        if (!detail::read_digits(line, pos, 2, d)) ok = detail::read_digits(line, pos, 1, d);
        break;
      }
      case 'b': {
        if (pos + 3 > line.size()) return std::nullopt;
        mo = detail::month_from_abbrev(line.substr(pos, 3));
        ok = mo != 0;
        pos += 3;
        break;
      }
      case 'f': {
        if (pos < line.size() && (line[pos] == '.' || line[pos] == ',')) {
          ++pos;
          int digits = 0;
          int v = 0;
          while (pos < line.size() && line[pos] >= '0' && line[pos] <= '9') {
            if (digits < 3) v = v * 10 + (line[pos] - '0');
            ++digits;
            ++pos;
          }
          if (digits == 0) return std::nullopt;
          for (int k = digits; k < 3; ++k) v *= 10;
          ms = v;
        }
        break;
      }
      case 'z': {
        if (pos < line.size() && line[pos] == 'Z') {
          ++pos;
        } else if (pos < line.size() && (line[pos] == '+' || line[pos] == '-')) {
          const int sign = line[pos] == '-' ? -1 : 1;
          ++pos;
          int hh = 0, mm = 0;
          if (!detail::read_digits(line, pos, 2, hh)) return std::nullopt;
          if (pos < line.size() && line[pos] == ':') ++pos;
          if (!detail::read_digits(line, pos, 2, mm)) return std::nullopt;
          tz = sign * (hh * 60 + mm);
        }
        break;
      }
      case '%':
        ok = pos < line.size() && line[pos] == '%';
        ++pos;
        break;
      default:
        throw ConfigError(std::string("unknown timestamp directive %") + directive);
    }
    if (!ok) return std::nullopt;
  }
  return detail::to_epoch_ms(y, mo, d, h, mi, sec, ms, tz);
}

struct IngestStats {
  std::uint64_t lines = 0;
  std::uint64_t parse_errors = 0;
  std::uint64_t dropped_late = 0;

  std::uint64_t parsed() const { return lines - parse_errors; }
  double parse_error_ratio() const {
    return lines == 0 ? 0.0 : static_cast<double>(parse_errors) / static_cast<double>(lines);
  }
};

/// Parses one line; unparseable lines are counted in `stats` and skipped.
inline std::optional<LogRecord> parse_line(std::string_view line, const TimestampPattern& pattern,
                                           IngestStats* stats = nullptr) {
  if (stats) ++stats->lines;
  auto ts = parse_timestamp(line, pattern);
  if (!ts) {
    if (stats) ++stats->parse_errors;
    return std::nullopt;
  }
  return LogRecord{*ts, std::string(line)};
}

// ---------------------------------------------------------------------------
// Binning
// ---------------------------------------------------------------------------

struct BinSeries {
  std::int64_t bin_len_ms = 1000;
  std::int64_t origin_ms = 0;
  std::vector<std::uint64_t> counts;

  std::int64_t end_ms() const { return origin_ms + static_cast<std::int64_t>(counts.size()) * bin_len_ms; }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

/// Counts records per aligned bin. Records older than the newest timestamp
/// seen minus `lateness_ms` are dropped. Empty bins stay as explicit zeros.
class Binner {
 public:
  static constexpr std::int64_t kDefaultBinMs = 1000;
  static constexpr std::int64_t kDefaultLatenessMs = 2000;

  explicit Binner(std::int64_t bin_len_ms = kDefaultBinMs, std::int64_t lateness_ms = kDefaultLatenessMs)
      : lateness_(lateness_ms) {
    if (bin_len_ms <= 0 || lateness_ms < 0) throw ConfigError("bin length must be positive, lateness non-negative");
    series_.bin_len_ms = bin_len_ms;
  }

  bool add(std::int64_t ts) {
    if (!started_) {
      started_ = true;
      watermark_ = ts;
      series_.origin_ms = align(ts);
    }
    if (ts < watermark_ - lateness_) {
      ++dropped_;
      return false;
    }
    watermark_ = std::max(watermark_, ts);
    if (ts < series_.origin_ms) {
      const std::int64_t new_origin = align(ts);
      const auto extra = static_cast<std::size_t>((series_.origin_ms - new_origin) / series_.bin_len_ms);
      series_.counts.insert(series_.counts.begin(), extra, 0);
      series_.origin_ms = new_origin;
    }
    const auto idx = static_cast<std::size_t>((ts - series_.origin_ms) / series_.bin_len_ms);
    if (idx >= series_.counts.size()) series_.counts.resize(idx + 1, 0);
    ++series_.counts[idx];
    return true;
  }

  /// Extends the series with empty bins so it spans at least [start_ms, end_ms).
  void cover(std::int64_t start_ms, std::int64_t end_ms) {
    if (end_ms <= start_ms) return;
    if (!started_) {
      started_ = true;
      watermark_ = start_ms;
      series_.origin_ms = align(start_ms);
    }
    if (align(start_ms) < series_.origin_ms) {
      const auto extra = static_cast<std::size_t>((series_.origin_ms - align(start_ms)) / series_.bin_len_ms);
      series_.counts.insert(series_.counts.begin(), extra, 0);
      series_.origin_ms = align(start_ms);
    }
    const std::int64_t last = align(end_ms - 1);
    const auto need = static_cast<std::size_t>((last - series_.origin_ms) / series_.bin_len_ms + 1);
    if (need > series_.counts.size()) series_.counts.resize(need, 0);
  }

  std::uint64_t dropped() const { return dropped_; }
  const BinSeries& series() const { return series_; }

 private:
  std::int64_t align(std::int64_t ts) const {
    const std::int64_t b = series_.bin_len_ms;
    std::int64_t q = ts / b;
    if (ts % b != 0 && ts < 0) --q;
    return q * b;
  }

  std::int64_t lateness_;
  bool started_ = false;
  std::int64_t watermark_ = 0;
  std::uint64_t dropped_ = 0;
  BinSeries series_;
};

inline BinSeries bin(std::span<const std::int64_t> timestamps, std::int64_t bin_len_ms = Binner::kDefaultBinMs,
                     std::int64_t lateness_ms = Binner::kDefaultLatenessMs, std::uint64_t* dropped = nullptr) {
  Binner b(bin_len_ms, lateness_ms);
  for (auto ts : timestamps) b.add(ts);
  if (dropped) *dropped = b.dropped();
  return b.series();
}

/// Bins a stream known to span [start_ms, end_ms), keeping silent edges.
inline BinSeries bin_span(std::span<const std::int64_t> timestamps, std::int64_t start_ms, std::int64_t end_ms,
                          std::int64_t bin_len_ms = Binner::kDefaultBinMs,
                          std::int64_t lateness_ms = Binner::kDefaultLatenessMs) {
  Binner b(bin_len_ms, lateness_ms);
  b.cover(start_ms, end_ms);
  for (auto ts : timestamps) b.add(ts);
  return b.series();
}

/// Reads a whole log, returning the bin series and the line tallies.
inline BinSeries ingest_stream(std::istream& in, const TimestampPattern& pattern, IngestStats& stats,
                               std::int64_t bin_len_ms = Binner::kDefaultBinMs,
                               std::int64_t lateness_ms = Binner::kDefaultLatenessMs) {
  Binner b(bin_len_ms, lateness_ms);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++stats.lines;
    auto ts = parse_timestamp(line, pattern);
    if (!ts) {
      ++stats.parse_errors;
      continue;
    }
    b.add(*ts);
  }
  stats.dropped_late = b.dropped();
  return b.series();
}

inline constexpr std::string_view kBinsHeader = "bin_start_epoch_ms,count";

inline void write_bins(std::ostream& os, const BinSeries& bins) {
  os << kBinsHeader << '\n';
  for (std::size_t k = 0; k < bins.counts.size(); ++k) {
    os << bins.origin_ms + static_cast<std::int64_t>(k) * bins.bin_len_ms << ',' << bins.counts[k] << '\n';
  }
}

/// Clock-aligned sub-windows fully covered by the bin series, each carrying
/// the mean count per bin.
inline std::vector<ActivityWindow> sub_windows(const BinSeries& bins, std::int64_t sub_len_ms) {
  if (sub_len_ms <= 0 || sub_len_ms % bins.bin_len_ms != 0) {
    throw ConfigError("sub-window length must be a positive multiple of the bin length");
  }
  std::vector<ActivityWindow> out;
  if (bins.counts.empty()) return out;
  std::int64_t start = bins.origin_ms;
  if (const std::int64_t rem = ((start % sub_len_ms) + sub_len_ms) % sub_len_ms; rem != 0) start += sub_len_ms - rem;
  const auto per = static_cast<std::size_t>(sub_len_ms / bins.bin_len_ms);
  for (; start + sub_len_ms <= bins.end_ms(); start += sub_len_ms) {
    const auto first = static_cast<std::size_t>((start - bins.origin_ms) / bins.bin_len_ms);
    std::span<const std::uint64_t> slice(bins.counts.data() + first, per);
    out.push_back({start, start + sub_len_ms, window_mean(slice)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

/// Rate modulation active over [start_s, start_s + duration_s) from the log
/// start. multiplier 0 is a silence.
struct Episode {
  std::int64_t start_s = 0;
  std::int64_t duration_s = 0;
  double multiplier = 1.0;
  int severity = 1;
};

struct SynthProfile {
  std::int64_t start_ms = 1583020800000LL;  // 2020-03-01T00:00:00Z
  std::int64_t duration_s = 86400;
  double base_rate = 5.0;  // lines per second
  double diurnal_amplitude = 0.0;
  double diurnal_peak_hour = 14.0;
  // Log-normal multiplicative rate noise, redrawn every jitter_period_s
  // seconds, with unit mean. 0 disables it.
  double jitter_sigma = 0.0;
  std::int64_t jitter_period_s = 60;
  std::vector<Episode> episodes;

  /// Expected lines per second at second t after the start.
  double rate_at(std::int64_t t) const {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    const double hour = static_cast<double>(t) / 3600.0;
    double r = base_rate * (1.0 + diurnal_amplitude * std::cos(kTwoPi * (hour - diurnal_peak_hour) / 24.0));
    for (const auto& e : episodes) {
      if (t >= e.start_s && t < e.start_s + e.duration_s) r *= e.multiplier;
    }
    return r;
  }
};

inline void validate(const SynthProfile& p) {
  if (p.duration_s <= 0) throw ConfigError("profile: duration_s must be positive");
  if (!(p.base_rate > 0.0)) throw ConfigError("profile: base_rate must be positive");
  if (!(p.diurnal_amplitude >= 0.0 && p.diurnal_amplitude < 1.0)) {
    throw ConfigError("profile: diurnal_amplitude must lie in [0, 1)");
  }
  if (!(p.jitter_sigma >= 0.0) || p.jitter_period_s <= 0) {
    throw ConfigError("profile: jitter_sigma must be non-negative, jitter_period_s positive");
  }
  for (const auto& e : p.episodes) {
    if (e.start_s < 0 || e.duration_s <= 0 || e.start_s + e.duration_s > p.duration_s) {
      throw ConfigError("profile: episode outside the log span");
    }
    if (!(e.multiplier >= 0.0)) throw ConfigError("profile: episode multiplier must be non-negative");
    if (!is_valid_class(e.severity)) throw ConfigError("profile: episode severity must be 1..4");
  }
}

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T out{};
  if (!(is >> out) || !(is >> std::ws).eof()) throw ConfigError("profile: bad value for " + key + ": " + v);
  return out;
}

}  // namespace detail

/// Reads a `key = value` profile. Keys: start_ms, duration_s, base_rate,
/// diurnal_amplitude, diurnal_peak_hour, jitter_sigma, jitter_period_s, and repeated
/// `episode = start_s,duration_s,multiplier,severity`. '#' starts a comment.
inline SynthProfile parse_profile(std::istream& in) {
  SynthProfile p;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("profile: expected key = value: " + line);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key == "start_ms") {
      p.start_ms = detail::parse_number<std::int64_t>(key, val);
    } else if (key == "duration_s") {
      p.duration_s = detail::parse_number<std::int64_t>(key, val);
    } else if (key == "base_rate") {
      p.base_rate = detail::parse_number<double>(key, val);
    } else if (key == "diurnal_amplitude") {
      p.diurnal_amplitude = detail::parse_number<double>(key, val);
    } else if (key == "diurnal_peak_hour") {
      p.diurnal_peak_hour = detail::parse_number<double>(key, val);
    } else if (key == "jitter_sigma") {
      p.jitter_sigma = detail::parse_number<double>(key, val);
    } else if (key == "jitter_period_s") {
      p.jitter_period_s = detail::parse_number<std::int64_t>(key, val);
    } else if (key == "episode") {
      std::string v = val;
      std::replace(v.begin(), v.end(), ',', ' ');
      std::istringstream is(v);
      Episode e;
      if (!(is >> e.start_s >> e.duration_s >> e.multiplier >> e.severity) || !(is >> std::ws).eof()) {
        throw ConfigError("profile: bad episode: " + val);
      }
      p.episodes.push_back(e);
    } else {
      throw ConfigError("profile: unknown key " + key);
    }
  }
  validate(p);
  return p;
}

/// Sorted record timestamps (epoch ms). Per-second counts are Poisson with
/// the profile rate; offsets inside the second are uniform.
inline std::vector<std::int64_t> synth(const SynthProfile& p, std::uint64_t seed) {
  validate(p);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> offset(0, 999);
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(p.base_rate * static_cast<double>(p.duration_s) * 1.2));
  std::normal_distribution<double> gauss(0.0, 1.0);
  double jitter = 1.0;
  std::vector<int> ms;
  for (std::int64_t t = 0; t < p.duration_s; ++t) {
    if (p.jitter_sigma > 0.0 && t % p.jitter_period_s == 0) {
      jitter = std::exp(p.jitter_sigma * gauss(rng) - p.jitter_sigma * p.jitter_sigma / 2.0);
    }
    const double rate = p.rate_at(t) * jitter;
    if (!(rate > 0.0)) continue;
    std::poisson_distribution<int> count(rate);
    const int n = count(rng);
    ms.resize(static_cast<std::size_t>(n));
    for (auto& m : ms) m = offset(rng);
    std::sort(ms.begin(), ms.end());
    for (int m : ms) out.push_back(p.start_ms + t * 1000 + m);
  }
  return out;
}

inline std::string format_iso_ms(std::int64_t epoch_ms) {
  using namespace std::chrono;
  std::int64_t days = epoch_ms / 86'400'000LL;
  std::int64_t rem = epoch_ms % 86'400'000LL;
  if (rem < 0) {
    rem += 86'400'000LL;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3'600'000), static_cast<int>(rem / 60'000 % 60),
                static_cast<int>(rem / 1000 % 60), static_cast<int>(rem % 1000));
  return buf;
}

inline void write_log(std::ostream& os, std::span<const std::int64_t> timestamps) {
  std::uint64_t id = 0;
  for (auto ts : timestamps) os << format_iso_ms(ts) << " INFO synth[" << id++ << "]: event\n";
}

inline void write_truth(std::ostream& os, const SynthProfile& p) {
  os << "episode_start,episode_end,severity\n";
  for (const auto& e : p.episodes) {
    os << p.start_ms + e.start_s * 1000 << ',' << p.start_ms + (e.start_s + e.duration_s) * 1000 << ','
       << e.severity << '\n';
  }
}

}  // namespace loggran
