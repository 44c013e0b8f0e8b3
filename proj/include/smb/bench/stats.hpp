#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smb/core/time.hpp"

namespace smb::bench {

/// One round trip of an echo value.
struct RttSample {
  int task = 0;
  double value = 0.0;
  Timestamp t_out;
  Timestamp t_in;
  Duration rtt{0};
};

/// RTT = t_in - t_out, receive minus send. Throws MixedClockDomain or
/// NegativeRtt.
Duration compute_rtt(Timestamp t_out, Timestamp t_in);

/// Builds a sample, checking the timestamps.
RttSample make_sample(int task, double value, Timestamp t_out, Timestamp t_in);

inline constexpr std::size_t kHistogramBins = 200;  // 1 ms each, [0, 200) ms

struct LatencyStats {
  std::size_t count = 0;
  Duration min{0};
  double mean_ns = 0.0;
  Duration max{0};
  Duration p99{0};
  std::size_t lost = 0;
  /// bins[i] counts rtt in [i, i+1) ms; bins[kHistogramBins] is the overflow.
  std::array<std::size_t, kHistogramBins + 1> bins{};

  [[nodiscard]] double min_ms() const { return to_ms(min); }
  [[nodiscard]] double mean_ms() const { return mean_ns / 1e6; }
  [[nodiscard]] double max_ms() const { return to_ms(max); }
  [[nodiscard]] double p99_ms() const { return to_ms(p99); }
};

/// Exact min/mean/max, nearest-rank p99 (the ceil(0.99 n)-th smallest) and
/// the 1 ms histogram. Throws EmptySamples.
LatencyStats compute_stats(std::span<const Duration> rtts, std::size_t lost = 0);
LatencyStats compute_stats(std::span<const RttSample> samples, std::size_t lost = 0);

/// Half the mean round trip.
Duration one_way_estimate(const LatencyStats& stats);

struct Report {
  /// "Min: <v> ms. Avg: <v> ms. Max: <v> ms. @99%: <v> ms."
  std::string summary;
  /// "bin_start_ms,count" header plus one row per bin; overflow row is "200+".
  std::string histogram_csv;
};

/// Formats a millisecond value with at most two decimals and no trailing zeros.
std::string format_ms(double ms);
std::string summary_line(double min_ms, double mean_ms, double max_ms, double p99_ms);
Report render_report(const LatencyStats& stats);

/// {"count","min_ms","mean_ms","max_ms","p99_ms","lost"} in that order.
nlohmann::ordered_json stats_to_json(const LatencyStats& stats);

/// Writes stats.json, histogram.csv, summary.txt and samples.csv.
void write_run(const std::filesystem::path& dir, const LatencyStats& stats,
               std::span<const RttSample> samples);

}  // namespace smb::bench
