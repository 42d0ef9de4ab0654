#pragma once

// Plain-text model checkpoints, version 1. Whitespace separated, one record
// per line, doubles in shortest round-trip form:
//
//   loggran-checkpoint 1
//   model fbem|egnn
//   aggregation min|product          (egnn only)
//   penalize_on_error 0|1            (egnn only)
//   granularity <rho> <eta> <h_r> <rules_created_this_period> <step>
//   normalizer <seen> <min x5> <max x5>
//   granules <count>
//   g <class> <created_at> <last_win_at> <ls lc uc us> x5 [<w x5> <right> <wrong>]
//   end

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>

#include "loggran/dataset.hpp"
#include "loggran/egnn.hpp"
#include "loggran/fbem.hpp"

namespace loggran {

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline void write_common(std::ostream& os, const GranularityState& g, const Normalizer& n) {
  os << "granularity " << format_double(g.rho) << ' ' << format_double(g.eta) << ' ' << g.h_r << ' '
     << g.rules_created_this_period << ' ' << g.step << '\n';
  os << "normalizer " << n.seen();
  for (double v : n.min()) os << ' ' << format_double(v);
  for (double v : n.max()) os << ' ' << format_double(v);
  os << '\n';
}

inline void write_sets(std::ostream& os, const GranuleSets& sets) {
  for (const auto& s : sets) {
    for (double v : s.params()) os << ' ' << format_double(v);
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::istringstream line(const std::string& expected_tag) {
    std::string l;
    if (!std::getline(in_, l)) throw FormatError("checkpoint: missing '" + expected_tag + "' record");
    std::istringstream is(l);
    std::string tag;
    is >> tag;
    if (tag != expected_tag) throw FormatError("checkpoint: expected '" + expected_tag + "', got '" + tag + "'");
    return is;
  }

  static double real(std::istringstream& is) {
    std::string tok;
    if (!(is >> tok)) throw FormatError("checkpoint: truncated record");
    return parse_double(tok);
  }

  template <class T>
  static T integer(std::istringstream& is) {
    T v{};
    if (!(is >> v)) throw FormatError("checkpoint: truncated record");
    return v;
  }

 private:
  std::istream& in_;
};

inline GranularityState read_granularity(Reader& r) {
  auto is = r.line("granularity");
  GranularityState g;
  g.rho = Reader::real(is);
  g.eta = Reader::real(is);
  g.h_r = Reader::integer<std::uint64_t>(is);
  g.rules_created_this_period = Reader::integer<std::uint64_t>(is);
  g.step = Reader::integer<Step>(is);
  return g;
}

inline Normalizer read_normalizer(Reader& r) {
  auto is = r.line("normalizer");
  const auto seen = Reader::integer<std::uint64_t>(is);
  Vec lo{}, hi{};
  for (auto& v : lo) v = Reader::real(is);
  for (auto& v : hi) v = Reader::real(is);
  Normalizer n;
  n.restore(lo, hi, seen);
  return n;
}

template <class Granule>
void read_head(std::istringstream& is, Granule& g) {
  g.class_label = Reader::integer<int>(is);
  g.created_at = Reader::integer<Step>(is);
  g.last_win_at = Reader::integer<Step>(is);
  for (auto& s : g.sets) {
    s.lower_support = Reader::real(is);
    s.lower_core = Reader::real(is);
    s.upper_core = Reader::real(is);
    s.upper_support = Reader::real(is);
    if (!s.is_ordered()) throw FormatError("checkpoint: unordered fuzzy set");
  }
}

}  // namespace detail

inline void save(std::ostream& os, const FbemModel& m) {
  os << "loggran-checkpoint " << kCheckpointVersion << "\nmodel fbem\n";
  detail::write_common(os, m.granularity(), m.normalizer());
  os << "granules " << m.size() << '\n';
  for (const auto& g : m.granules()) {
    os << "g " << g.class_label << ' ' << g.created_at << ' ' << g.last_win_at;
    detail::write_sets(os, g.sets);
    os << '\n';
  }
  os << "end\n";
}

inline void save(std::ostream& os, const EgnnModel& m) {
  os << "loggran-checkpoint " << kCheckpointVersion << "\nmodel egnn\n";
  os << "aggregation " << (m.aggregation() == AggregationKind::kMin ? "min" : "product") << '\n';
  os << "penalize_on_error " << (m.penalize_on_error() ? 1 : 0) << '\n';
  detail::write_common(os, m.granularity(), m.normalizer());
  os << "granules " << m.size() << '\n';
  for (const auto& g : m.granules()) {
    os << "g " << g.class_label << ' ' << g.created_at << ' ' << g.last_win_at;
    detail::write_sets(os, g.sets);
    for (double w : g.weights) os << ' ' << format_double(w);
    os << ' ' << g.right_count << ' ' << g.wrong_count << '\n';
  }
  os << "end\n";
}

using AnyModel = std::variant<FbemModel, EgnnModel>;

inline AnyModel load(std::istream& in) {
  detail::Reader r(in);
  {
    auto is = r.line("loggran-checkpoint");
    if (detail::Reader::integer<int>(is) != kCheckpointVersion) throw FormatError("checkpoint: unsupported version");
  }
  std::string kind;
  r.line("model") >> kind;
  if (kind == "fbem") {
    const auto gran = detail::read_granularity(r);
    const auto norm = detail::read_normalizer(r);
    auto cnt = r.line("granules");
    const auto n = detail::Reader::integer<std::size_t>(cnt);
    std::vector<FbemGranule> gs(n);
    for (auto& g : gs) {
      auto is = r.line("g");
      detail::read_head(is, g);
    }
    r.line("end");
    return FbemModel(std::move(gs), gran, norm);
  }
  if (kind == "egnn") {
    std::string agg;
    r.line("aggregation") >> agg;
    if (agg != "min" && agg != "product") throw FormatError("checkpoint: unknown aggregation " + agg);
    auto pis = r.line("penalize_on_error");
    const int penalize = detail::Reader::integer<int>(pis);
    const auto gran = detail::read_granularity(r);
    const auto norm = detail::read_normalizer(r);
    auto cnt = r.line("granules");
    const auto n = detail::Reader::integer<std::size_t>(cnt);
    std::vector<EgnnGranule> gs(n);
    for (auto& g : gs) {
      auto is = r.line("g");
      detail::read_head(is, g);
      for (auto& w : g.weights) w = detail::Reader::real(is);
      g.right_count = detail::Reader::integer<std::uint64_t>(is);
      g.wrong_count = detail::Reader::integer<std::uint64_t>(is);
    }
    r.line("end");
    return EgnnModel(std::move(gs), gran, norm, agg == "min" ? AggregationKind::kMin : AggregationKind::kProduct,
                     penalize != 0);
  }
  throw FormatError("checkpoint: unknown model kind " + kind);
}

}  // namespace loggran
