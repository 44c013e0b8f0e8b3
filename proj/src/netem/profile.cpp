#include "smb/netem/profile.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "smb/error.hpp"

namespace smb::netem {

using namespace std::chrono_literals;

void NetProfile::validate() const {
  if (base_delay < Duration::zero() || jitter.bound < Duration::zero() ||
      jitter.sigma < Duration::zero()) {
    throw Error(ErrorCode::InvalidArgument, "profile '" + name + "' has a negative duration");
  }
  if (!(loss_prob >= 0.0 && loss_prob < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "profile '" + name + "' loss_prob outside [0, 1)");
  }
}

bool NetProfile::is_passthrough() const {
  bool no_jitter = jitter.kind == JitterKind::none ||
                   (jitter.kind == JitterKind::uniform && jitter.bound == Duration::zero()) ||
                   (jitter.kind == JitterKind::normal && jitter.sigma == Duration::zero());
  return base_delay == Duration::zero() && no_jitter && loss_prob == 0.0;
}

NetProfile NetProfile::scaled(double factor) const {
  auto scale = [factor](Duration d) {
    return Duration(static_cast<Duration::rep>(std::llround(static_cast<double>(d.count()) * factor)));
  };
  NetProfile p = *this;
  p.base_delay = scale(base_delay);
  p.jitter.bound = scale(jitter.bound);
  p.jitter.sigma = scale(jitter.sigma);
  return p;
}

Duration NetProfile::mean_delay() const { return base_delay; }

NetProfile preset(std::string_view name, std::uint64_t seed) {
  NetProfile p;
  p.name = std::string(name);
  p.seed = seed;
  if (name == "none") {
    return p;
  }
  if (name == "lan") {
    p.base_delay = 300us;
    p.jitter = {JitterKind::uniform, 100us, 0us};
    return p;
  }
  if (name == "4g") {
    p.base_delay = 25ms;
    p.jitter = {JitterKind::normal, 10ms, 5ms};
    return p;
  }
  if (name == "3g") {
    p.base_delay = 65ms;
    p.jitter = {JitterKind::normal, 25ms, 15ms};
    return p;
  }
  throw Error(ErrorCode::UnknownPreset, "no network preset named '" + std::string(name) + "'");
}

namespace {

Duration ms_field(const nlohmann::json& j, const char* key) {
  return j.contains(key) ? from_ms(j.at(key).get<double>()) : Duration::zero();
}

}  // namespace

NetProfile profile_from_json(const nlohmann::json& j) {
  try {
    std::uint64_t seed = j.value("seed", std::uint64_t{0});
    if (j.contains("profile")) {
      return preset(j.at("profile").get<std::string>(), seed);
    }
    NetProfile p;
    p.name = j.value("name", std::string("custom"));
    p.seed = seed;
    p.base_delay = ms_field(j, "base_delay_ms");
    p.loss_prob = j.value("loss_prob", 0.0);
    if (j.contains("jitter")) {
      const auto& jj = j.at("jitter");
      auto kind = jj.value("kind", std::string("none"));
      if (kind == "none") {
        p.jitter.kind = JitterKind::none;
      } else if (kind == "uniform") {
        p.jitter.kind = JitterKind::uniform;
      } else if (kind == "normal") {
        p.jitter.kind = JitterKind::normal;
      } else {
        throw Error(ErrorCode::ConfigInvalid, "unknown jitter kind '" + kind + "'");
      }
      p.jitter.bound = ms_field(jj, "bound_ms");
      p.jitter.sigma = ms_field(jj, "sigma_ms");
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("net profile: ") + e.what());
  }
}

nlohmann::json profile_to_json(const NetProfile& p) {
  const char* kind = p.jitter.kind == JitterKind::none      ? "none"
                     : p.jitter.kind == JitterKind::uniform ? "uniform"
                                                            : "normal";
  return {{"name", p.name},
          {"base_delay_ms", to_ms(p.base_delay)},
          {"jitter", {{"kind", kind}, {"bound_ms", to_ms(p.jitter.bound)}, {"sigma_ms", to_ms(p.jitter.sigma)}}},
          {"loss_prob", p.loss_prob},
          {"seed", p.seed}};
}

std::uint64_t link_seed(std::uint64_t seed, std::string_view link_id) {
  // FNV-1a over the link id, then a splitmix64 finalizer mixed with the seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : link_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DelaySampler::DelaySampler(const NetProfile& profile, std::string_view link_id)
    : profile_(profile),
      delay_rng_(link_seed(profile.seed, link_id)),
      loss_rng_(link_seed(profile.seed ^ 0x5bd1e995ULL, link_id)) {
  profile_.validate();
}

Duration DelaySampler::sample() {
  double base = static_cast<double>(profile_.base_delay.count());
  double bound = static_cast<double>(profile_.jitter.bound.count());
  double offset = 0.0;
  switch (profile_.jitter.kind) {
    case JitterKind::none:
      break;
    case JitterKind::uniform:
      if (bound > 0.0) offset = std::uniform_real_distribution<double>(-bound, bound)(delay_rng_);
      break;
    case JitterKind::normal: {
      double sigma = static_cast<double>(profile_.jitter.sigma.count());
      if (sigma > 0.0) offset = std::normal_distribution<double>(0.0, sigma)(delay_rng_);
      if (bound > 0.0) offset = std::clamp(offset, -bound, bound);
      break;
    }
  }
  return Duration(static_cast<Duration::rep>(std::llround(std::max(0.0, base + offset))));
}

bool DelaySampler::lost() {
  if (profile_.loss_prob <= 0.0) return false;
  return std::bernoulli_distribution(profile_.loss_prob)(loss_rng_);
}

}  // namespace smb::netem
