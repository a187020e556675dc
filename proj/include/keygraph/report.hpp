#pragma once

// Text serialization of experiment results: sweep CSV (with a parser for round
// trips), JSON mirrors carrying a run manifest, two-column plot data, and the
// zero-one probe trend CSV. Probabilities are written with 6 decimals; counts
// and parameters are written exactly.

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "keygraph/errors.hpp"
#include "keygraph/experiment.hpp"
#include "keygraph/model_core.hpp"

namespace keygraph {

using json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] inline std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return ec == std::errc{} ? std::string(buf.data(), end) : std::string{"nan"};
}

[[nodiscard]] inline std::string format_probability(double value) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6f", value);
  return buf.data();
}

/// Who produced a report and how to reproduce it.
struct RunManifest {
  std::string command;
  json config;  // flat object keyed by flag names
  std::uint64_t master_seed{0};
  std::string version;
  double duration_seconds{0.0};
};

[[nodiscard]] inline json to_json(const RunManifest& m) {
  return json{{"command", m.command},
              {"config", m.config},
              {"master_seed", m.master_seed},
              {"version", m.version},
              {"duration_seconds", m.duration_seconds}};
}

// ---------------------------------------------------------------------------
// Sweep CSV

inline constexpr const char* kSweepCsvHeader =
    "model,alpha_or_rho,K,n,P,trials,count_connected,count_no_isolated,p_connected,p_no_isolated,ci_low,ci_high,"
    "threshold_K";

/// Header plus one line per row; no manifest.
[[nodiscard]] inline std::string sweep_csv_body(const SweepReport& report) {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const SweepRow& row : report.rows) {
    const PointEstimate& e = row.estimate;
    os << to_string(report.config.model) << ',' << format_real(row.channel_value) << ',' << row.k << ',' << e.n << ','
       << report.config.pool_size << ',' << e.trials << ',' << e.count_connected << ',' << e.count_no_isolated << ','
       << format_probability(e.p_connected) << ',' << format_probability(e.p_no_isolated) << ','
       << format_probability(e.ci_low) << ',' << format_probability(e.ci_high) << ','
       << (row.threshold_k ? std::to_string(*row.threshold_k) : std::string{"NA"}) << '\n';
  }
  return os.str();
}

/// CSV with the manifest embedded as a leading "# manifest " comment line.
inline void write_sweep_csv(std::ostream& os, const SweepReport& report, const std::optional<RunManifest>& manifest) {
  if (manifest) {
    os << "# manifest " << to_json(*manifest).dump() << '\n';
  }
  os << sweep_csv_body(report);
}

/// One parsed line of a sweep CSV.
struct SweepCsvRow {
  ModelKind model{ModelKind::on_off};
  double channel_value{0.0};
  std::uint64_t k{0};
  std::uint64_t n{0};
  std::uint64_t pool_size{0};
  std::uint64_t trials{0};
  std::uint64_t count_connected{0};
  std::uint64_t count_no_isolated{0};
  double p_connected{0.0};
  double p_no_isolated{0.0};
  double ci_low{0.0};
  double ci_high{0.0};
  std::optional<std::uint64_t> threshold_k;

  friend bool operator==(const SweepCsvRow&, const SweepCsvRow&) = default;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is{line};
  while (std::getline(is, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

template <class T>
T parse_number(const std::string& text, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  require(ec == std::errc{} && ptr == text.data() + text.size(), std::string{"parse_sweep_csv: bad "} + what + " '" +
                                                                      text + "'");
  return value;
}

}  // namespace detail

/// Parses a sweep CSV written by write_sweep_csv. Comment lines are skipped.
[[nodiscard]] inline std::vector<SweepCsvRow> parse_sweep_csv(std::istream& is) {
  std::vector<SweepCsvRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#') {
      continue;
    }
    if (!header_seen) {
      detail::require(line == kSweepCsvHeader, "parse_sweep_csv: unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = detail::split_csv_line(line);
    detail::require(f.size() == 13, "parse_sweep_csv: expected 13 fields in '" + line + "'");
    SweepCsvRow row;
    detail::require(f[0] == "on_off" || f[0] == "disk", "parse_sweep_csv: unknown model '" + f[0] + "'");
    row.model = f[0] == "on_off" ? ModelKind::on_off : ModelKind::disk;
    row.channel_value = detail::parse_number<double>(f[1], "alpha_or_rho");
    row.k = detail::parse_number<std::uint64_t>(f[2], "K");
    row.n = detail::parse_number<std::uint64_t>(f[3], "n");
    row.pool_size = detail::parse_number<std::uint64_t>(f[4], "P");
    row.trials = detail::parse_number<std::uint64_t>(f[5], "trials");
    row.count_connected = detail::parse_number<std::uint64_t>(f[6], "count_connected");
    row.count_no_isolated = detail::parse_number<std::uint64_t>(f[7], "count_no_isolated");
    row.p_connected = detail::parse_number<double>(f[8], "p_connected");
    row.p_no_isolated = detail::parse_number<double>(f[9], "p_no_isolated");
    row.ci_low = detail::parse_number<double>(f[10], "ci_low");
    row.ci_high = detail::parse_number<double>(f[11], "ci_high");
    if (f[12] != "NA") {
      row.threshold_k = detail::parse_number<std::uint64_t>(f[12], "threshold_K");
    }
    rows.push_back(row);
  }
  detail::require(header_seen, "parse_sweep_csv: missing header");
  return rows;
}

// ---------------------------------------------------------------------------
// JSON mirrors and plot data

[[nodiscard]] inline json to_json(const SweepRow& row, const SweepConfig& config) {
  const PointEstimate& e = row.estimate;
  return json{{"model", to_string(config.model)},
              {"alpha_or_rho", row.channel_value},
              {"K", row.k},
              {"n", e.n},
              {"P", config.pool_size},
              {"trials", e.trials},
              {"count_connected", e.count_connected},
              {"count_no_isolated", e.count_no_isolated},
              {"p_connected", e.p_connected},
              {"p_no_isolated", e.p_no_isolated},
              {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},
              {"equivalence_rate", e.equivalence_rate},
              {"mean_isolated", e.mean_isolated},
              {"threshold_K", row.threshold_k ? json(*row.threshold_k) : json(nullptr)}};
}

[[nodiscard]] inline json sweep_json(const SweepReport& report, const RunManifest& manifest) {
  json rows = json::array();
  for (const SweepRow& row : report.rows) {
    rows.push_back(to_json(row, report.config));
  }
  return json{{"manifest", to_json(manifest)}, {"rows", rows}};
}

/// Two columns "K p_connected" for one channel value, preceded by "# threshold=<K*>".
inline void write_plot_data(std::ostream& os, const std::vector<SweepRow>& curve) {
  const auto threshold = curve.empty() ? std::nullopt : curve.front().threshold_k;
  os << "# threshold=" << (threshold ? std::to_string(*threshold) : std::string{"NA"}) << '\n';
  for (const SweepRow& row : curve) {
    os << row.k << ' ' << format_probability(row.estimate.p_connected) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Zero-one probe trend

inline constexpr const char* kZeroOneCsvHeader = "n,K,P,alpha,achieved_c,p_connected,p_no_isolated";

[[nodiscard]] inline std::string zero_one_csv_body(const std::vector<ZeroOneRow>& rows) {
  std::ostringstream os;
  os << kZeroOneCsvHeader << '\n';
  for (const ZeroOneRow& row : rows) {
    const auto& key = row.point.params.key();
    os << row.point.n << ',' << key.ring_size() << ',' << key.pool_size() << ','
       << format_real(row.point.params.alpha()) << ',' << format_probability(row.point.achieved_c) << ','
       << format_probability(row.estimate.p_connected) << ',' << format_probability(row.estimate.p_no_isolated)
       << '\n';
  }
  return os.str();
}

[[nodiscard]] inline std::string to_string(const AlphaLimit& limit) {
  switch (limit.kind) {
    case AlphaLimit::Kind::zero:
      return "zero";
    case AlphaLimit::Kind::finite:
      return "finite(" + format_real(limit.value) + ")";
    case AlphaLimit::Kind::infinite:
      return "infinite";
  }
  return {};
}

[[nodiscard]] inline json zero_one_json(const std::vector<ZeroOneRow>& rows, const RunManifest& manifest) {
  json out = json::array();
  for (const ZeroOneRow& row : rows) {
    const auto& key = row.point.params.key();
    out.push_back(json{{"n", row.point.n},
                       {"K", key.ring_size()},
                       {"P", key.pool_size()},
                       {"alpha", row.point.params.alpha()},
                       {"target_c", row.point.c},
                       {"achieved_c", row.point.achieved_c},
                       {"alpha_star", to_string(row.point.alpha_star)},
                       {"trials", row.estimate.trials},
                       {"count_connected", row.estimate.count_connected},
                       {"count_no_isolated", row.estimate.count_no_isolated},
                       {"p_connected", row.estimate.p_connected},
                       {"p_no_isolated", row.estimate.p_no_isolated}});
  }
  return json{{"manifest", to_json(manifest)}, {"rows", out}};
}

}  // namespace keygraph
