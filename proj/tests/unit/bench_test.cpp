#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "smb/bench/stats.hpp"
#include "smb/error.hpp"

using namespace smb;
using namespace smb::bench;
using namespace std::chrono_literals;

namespace {

Duration ms(double v) { return from_ms(v); }

}  // namespace

TEST(Rtt, ReceiveMinusSend) {
  EXPECT_EQ(compute_rtt(Timestamp::wall(100'000'000), Timestamp::wall(127'100'000)), Duration(27'100'000));
  EXPECT_EQ(compute_rtt(Timestamp::wall(5), Timestamp::wall(5)), Duration::zero());
}

TEST(Rtt, Errors) {
  try {
    compute_rtt(Timestamp::wall(10), Timestamp::wall(9));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativeRtt);
  }
  try {
    compute_rtt(Timestamp::wall(10), Timestamp::sim(20));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MixedClockDomain);
  }
  auto s = make_sample(3, 7.0, Timestamp::wall(1), Timestamp::wall(11));
  EXPECT_EQ(s.rtt, Duration(10));
  EXPECT_EQ(s.task, 3);
}

TEST(Stats, ThreeElements) {
  std::vector<Duration> v{10ms, 20ms, 30ms};
  auto s = compute_stats(v);
  EXPECT_EQ(s.count, 3u);
  EXPECT_EQ(s.min, 10ms);
  EXPECT_DOUBLE_EQ(s.mean_ms(), 20.0);
  EXPECT_EQ(s.max, 30ms);
  EXPECT_EQ(s.p99, 30ms);
}

TEST(Stats, NearestRankOnOneToHundred) {
  std::vector<Duration> v;
  for (int i = 100; i >= 1; --i) v.push_back(ms(i));
  EXPECT_EQ(compute_stats(v).p99, 99ms);
}

TEST(Stats, EmptyThrows) {
  try {
    compute_stats(std::span<const Duration>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySamples);
  }
}

TEST(Stats, MatchesSortOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng() % 2000;
    std::vector<Duration> v(n);
    for (auto& d : v) d = Duration(static_cast<Duration::rep>(rng() % 300'000'000));
    auto s = compute_stats(v);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::size_t rank = static_cast<std::size_t>(std::ceil(0.99L * static_cast<long double>(n)));
    long double sum = 0;
    for (auto d : v) sum += static_cast<long double>(d.count());
    ASSERT_EQ(s.min, sorted.front());
    ASSERT_EQ(s.max, sorted.back());
    ASSERT_EQ(s.p99, sorted[rank - 1]);
    ASSERT_DOUBLE_EQ(s.mean_ns, static_cast<double>(sum / static_cast<long double>(n)));
  }
}

TEST(Stats, ShiftedExponentialWithinTwoPercent) {
  // min 14 ms, mean 27.1 ms: shift 14, exponential with mean 13.1.
  std::mt19937_64 rng(2024);
  std::exponential_distribution<double> expo(1.0 / 13.1);
  std::vector<Duration> v(20000);
  for (auto& d : v) d = ms(14.0 + expo(rng));
  auto s = compute_stats(v);
  const double p99 = 14.0 + 13.1 * std::log(100.0);
  EXPECT_NEAR(s.mean_ms(), 27.1, 0.02 * 27.1);
  EXPECT_NEAR(s.min_ms(), 14.0, 0.02 * 14.0);
  EXPECT_NEAR(s.p99_ms(), p99, 0.02 * p99);
}

TEST(Stats, HistogramBins) {
  std::vector<Duration> v{ms(0.5), ms(1.0), ms(1.9), ms(199.99), ms(200.0), ms(5000)};
  auto s = compute_stats(v, 4);
  EXPECT_EQ(s.bins[0], 1u);
  EXPECT_EQ(s.bins[1], 2u);
  EXPECT_EQ(s.bins[199], 1u);
  EXPECT_EQ(s.bins[kHistogramBins], 2u);
  EXPECT_EQ(s.lost, 4u);
  EXPECT_EQ(std::accumulate(s.bins.begin(), s.bins.end(), std::size_t{0}), v.size());
}

TEST(OneWay, HalfTheMean) {
  LatencyStats s;
  s.mean_ns = 27.1e6;
  EXPECT_EQ(one_way_estimate(s), Duration(13'550'000));
  s.mean_ns = 0;
  EXPECT_EQ(one_way_estimate(s), Duration::zero());
  s.mean_ns = 6.48e6;
  EXPECT_EQ(one_way_estimate(s), Duration(3'240'000));
}

TEST(Report, CaptionFormat) {
  EXPECT_EQ(summary_line(5.4, 6.48, 9.48, 8.98), "Min: 5.4 ms. Avg: 6.48 ms. Max: 9.48 ms. @99%: 8.98 ms.");
  EXPECT_EQ(summary_line(14.15, 15.93, 113.64, 33.06),
            "Min: 14.15 ms. Avg: 15.93 ms. Max: 113.64 ms. @99%: 33.06 ms.");
  LatencyStats zero;
  EXPECT_EQ(render_report(zero).summary, "Min: 0 ms. Avg: 0 ms. Max: 0 ms. @99%: 0 ms.");
  EXPECT_EQ(format_ms(27.1), "27.1");
  EXPECT_EQ(format_ms(3.0), "3");
  EXPECT_EQ(format_ms(0.004), "0");
}

TEST(Report, HistogramCsv) {
  std::vector<Duration> v{ms(1.5), ms(250)};
  auto csv = render_report(compute_stats(v)).histogram_csv;
  EXPECT_EQ(csv.rfind("bin_start_ms,count\n0,0\n1,1\n", 0), 0u);
  EXPECT_NE(csv.find("\n200+,1\n"), std::string::npos);
}

TEST(Report, WriteRunArtifacts) {
  auto dir = std::filesystem::temp_directory_path() / "smb_bench_write_run";
  std::filesystem::remove_all(dir);
  std::vector<RttSample> samples{make_sample(1, 1.0, Timestamp::wall(0), Timestamp::wall(2'000'000)),
                                 make_sample(2, 1.0, Timestamp::wall(0), Timestamp::wall(4'000'000))};
  auto stats = compute_stats(samples, 1);
  write_run(dir, stats, samples);
  for (const char* f : {"stats.json", "histogram.csv", "summary.txt", "samples.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "stats.json");
  auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("count"), 2);
  EXPECT_EQ(j.at("lost"), 1);
  EXPECT_DOUBLE_EQ(j.at("mean_ms").get<double>(), 3.0);
  EXPECT_EQ(stats_to_json(stats).dump(), R"({"count":2,"min_ms":2.0,"mean_ms":3.0,"max_ms":4.0,"p99_ms":4.0,"lost":1})");
  std::ifstream samples_csv(dir / "samples.csv");
  std::string header;
  std::getline(samples_csv, header);
  EXPECT_EQ(header, "task,value,t_out_ns,t_in_ns,rtt_ns");
}
