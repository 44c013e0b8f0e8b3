#include "smb/bench/stats.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>

#include <fmt/format.h>

#include "smb/error.hpp"

namespace smb::bench {

Duration compute_rtt(Timestamp t_out, Timestamp t_in) {
  Duration rtt = t_in - t_out;  // throws MixedClockDomain
  if (rtt < Duration::zero()) {
    throw Error(ErrorCode::NegativeRtt, fmt::format("received {} ns before it was sent", -rtt.count()));
  }
  return rtt;
}

RttSample make_sample(int task, double value, Timestamp t_out, Timestamp t_in) {
  return RttSample{task, value, t_out, t_in, compute_rtt(t_out, t_in)};
}

LatencyStats compute_stats(std::span<const Duration> rtts, std::size_t lost) {
  if (rtts.empty()) throw Error(ErrorCode::EmptySamples, "no RTT samples to summarise");

  std::vector<Duration> sorted(rtts.begin(), rtts.end());
  std::sort(sorted.begin(), sorted.end());

  LatencyStats s;
  s.count = sorted.size();
  s.lost = lost;
  s.min = sorted.front();
  s.max = sorted.back();
  // ceil(0.99 n) in integer arithmetic, 1-based rank.
  std::size_t rank = (99 * s.count + 99) / 100;
  s.p99 = sorted[rank - 1];

  std::uint64_t sum = 0;
  for (auto d : sorted) {
    sum += static_cast<std::uint64_t>(d.count());
    auto bin = static_cast<std::size_t>(d.count() / 1'000'000);
    s.bins[std::min(bin, kHistogramBins)]++;
  }
  s.mean_ns = static_cast<double>(sum) / static_cast<double>(s.count);
  return s;
}

LatencyStats compute_stats(std::span<const RttSample> samples, std::size_t lost) {
  std::vector<Duration> rtts;
  rtts.reserve(samples.size());
  for (const auto& s : samples) rtts.push_back(s.rtt);
  return compute_stats(rtts, lost);
}

Duration one_way_estimate(const LatencyStats& stats) {
  return Duration(static_cast<Duration::rep>(stats.mean_ns / 2.0));
}

std::string format_ms(double ms) {
  std::string s = fmt::format("{:.2f}", ms);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string summary_line(double min_ms, double mean_ms, double max_ms, double p99_ms) {
  return fmt::format("Min: {} ms. Avg: {} ms. Max: {} ms. @99%: {} ms.", format_ms(min_ms),
                     format_ms(mean_ms), format_ms(max_ms), format_ms(p99_ms));
}

Report render_report(const LatencyStats& stats) {
  Report r;
  r.summary = summary_line(stats.min_ms(), stats.mean_ms(), stats.max_ms(), stats.p99_ms());
  r.histogram_csv = "bin_start_ms,count\n";
  for (std::size_t i = 0; i < kHistogramBins; ++i) {
    r.histogram_csv += fmt::format("{},{}\n", i, stats.bins[i]);
  }
  r.histogram_csv += fmt::format("{}+,{}\n", kHistogramBins, stats.bins[kHistogramBins]);
  return r;
}

nlohmann::ordered_json stats_to_json(const LatencyStats& stats) {
  nlohmann::ordered_json j;
  j["count"] = stats.count;
  j["min_ms"] = stats.min_ms();
  j["mean_ms"] = stats.mean_ms();
  j["max_ms"] = stats.max_ms();
  j["p99_ms"] = stats.p99_ms();
  j["lost"] = stats.lost;
  return j;
}

void write_run(const std::filesystem::path& dir, const LatencyStats& stats,
               std::span<const RttSample> samples) {
  std::filesystem::create_directories(dir);
  auto report = render_report(stats);
  std::ofstream(dir / "stats.json") << stats_to_json(stats).dump(2) << "\n";
  std::ofstream(dir / "histogram.csv") << report.histogram_csv;
  std::ofstream(dir / "summary.txt") << report.summary << "\n";
  std::ofstream csv(dir / "samples.csv");
  csv << "task,value,t_out_ns,t_in_ns,rtt_ns\n";
  for (const auto& s : samples) {
    csv << fmt::format("{},{},{},{},{}\n", s.task, s.value, s.t_out.nanos(), s.t_in.nanos(), s.rtt.count());
  }
}

}  // namespace smb::bench
