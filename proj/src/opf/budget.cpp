#include "smb/opf/budget.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smb/error.hpp"

namespace smb::opf {

namespace {

constexpr std::size_t kBins = 4000;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// CDF of one leg's delay in nanoseconds.
double leg_cdf(const netem::NetProfile& p, double x) {
  if (x < 0.0) return 0.0;
  const double base = static_cast<double>(p.base_delay.count());
  const double bound = static_cast<double>(p.jitter.bound.count());
  switch (p.jitter.kind) {
    case netem::JitterKind::none:
      return x >= base ? 1.0 : 0.0;
    case netem::JitterKind::uniform:
      if (bound <= 0.0) return x >= base ? 1.0 : 0.0;
      return std::clamp((x - base + bound) / (2.0 * bound), 0.0, 1.0);
    case netem::JitterKind::normal: {
      const double sigma = static_cast<double>(p.jitter.sigma.count());
      if (bound > 0.0) {
        if (x >= base + bound) return 1.0;
        if (x < base - bound) return 0.0;
      }
      if (sigma <= 0.0) return x >= base ? 1.0 : 0.0;
      return normal_cdf((x - base) / sigma);
    }
  }
  return 1.0;
}

double leg_upper(const netem::NetProfile& p) {
  const double base = static_cast<double>(p.base_delay.count());
  double spread = static_cast<double>(p.jitter.bound.count());
  if (p.jitter.kind == netem::JitterKind::normal && spread <= 0.0) {
    spread = 8.0 * static_cast<double>(p.jitter.sigma.count());
  }
  return base + spread;
}

}  // namespace

Duration expected_max_delay(const netem::NetProfile& profile, int legs, std::size_t m) {
  profile.validate();
  if (legs < 1) throw Error(ErrorCode::InvalidArgument, "a message crosses at least one leg");
  if (m == 0) return Duration::zero();
  const double upper = leg_upper(profile);
  if (profile.jitter.kind == netem::JitterKind::none || upper <= static_cast<double>(profile.base_delay.count())) {
    return profile.base_delay * legs;
  }

  // Mass of one leg on bins [k h, (k + 1) h), then the sum of legs by convolution.
  const double h = upper / static_cast<double>(kBins);
  std::vector<double> leg(kBins + 1, 0.0);
  double prev = 0.0;
  for (std::size_t k = 0; k <= kBins; ++k) {
    double edge = static_cast<double>(k + 1) * h - 1e-9;
    double c = k == kBins ? 1.0 : leg_cdf(profile, edge);
    leg[k] = std::max(0.0, c - prev);
    prev = c;
  }
  std::vector<double> total = leg;
  for (int l = 1; l < legs; ++l) {
    std::vector<double> next(total.size() + leg.size() - 1, 0.0);
    for (std::size_t a = 0; a < total.size(); ++a) {
      if (total[a] == 0.0) continue;
      for (std::size_t b = 0; b < leg.size(); ++b) next[a + b] += total[a] * leg[b];
    }
    total = std::move(next);
  }

  // Bin k holds the sum of `legs` bin midpoints.
  double cdf = 0.0, prev_max = 0.0, mean = 0.0;
  const auto md = static_cast<double>(m);
  for (std::size_t k = 0; k < total.size(); ++k) {
    cdf = std::min(1.0, cdf + total[k]);
    double cur = std::pow(cdf, md);
    mean += (static_cast<double>(k) + 0.5 * legs) * h * (cur - prev_max);
    prev_max = cur;
  }
  return Duration(static_cast<Duration::rep>(std::llround(mean)));
}

Duration latency_budget_oracle(const netem::NetProfile& profile, int iterations, const DcNetwork& topology,
                               const BudgetModel& model) {
  if (iterations < 0) throw Error(ErrorCode::InvalidArgument, "negative iteration count");
  const std::size_t messages = 2 * topology.edges.size();
  const Duration per_iteration = model.compute_allowance + expected_max_delay(profile, model.legs_per_message, messages);
  return per_iteration * iterations;
}

Duration calibrate_compute_allowance(const netem::NetProfile& baseline, const std::vector<RatioTarget>& targets,
                                     const DcNetwork& topology, int legs_per_message, Duration max_allowance) {
  if (targets.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to calibrate against");
  const std::size_t messages = 2 * topology.edges.size();
  const double base = static_cast<double>(expected_max_delay(baseline, legs_per_message, messages).count());
  std::vector<std::pair<double, double>> delays;  // (expected max delay, log target)
  for (const auto& t : targets) {
    if (!(t.ratio > 0.0)) throw Error(ErrorCode::InvalidArgument, "ratios must be positive");
    delays.emplace_back(static_cast<double>(expected_max_delay(t.profile, legs_per_message, messages).count()),
                        std::log(t.ratio));
  }
  auto loss = [&](double c) {
    double sum = 0.0;
    for (const auto& [x, target] : delays) {
      double denom = c + base;
      if (denom <= 0.0) return std::numeric_limits<double>::infinity();
      double err = std::log((c + x) / denom) - target;
      sum += err * err;
    }
    return sum;
  };
  // The loss is unimodal in c for ratios above one; golden-section search.
  double lo = 0.0, hi = static_cast<double>(max_allowance.count());
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = loss(a), fb = loss(b);
  for (int i = 0; i < 200 && hi - lo > 1.0; ++i) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = loss(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = loss(b);
    }
  }
  double best = (lo + hi) / 2.0;
  if (loss(0.0) < loss(best)) best = 0.0;
  return Duration(static_cast<Duration::rep>(std::llround(best)));
}

}  // namespace smb::opf
