#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "smb/core/time.hpp"

namespace smb::netem {

enum class JitterKind { none, uniform, normal };

struct Jitter {
  JitterKind kind = JitterKind::none;
  /// Half-width for uniform jitter; symmetric clamp for normal jitter
  /// (zero means unclamped).
  Duration bound{0};
  /// Standard deviation, normal jitter only.
  Duration sigma{0};
};

/// One-way link model applied independently to every leg.
struct NetProfile {
  std::string name = "none";
  Duration base_delay{0};
  Jitter jitter;
  double loss_prob = 0.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on negative delays or loss outside [0, 1).
  void validate() const;

  /// True when every sample is exactly zero delay and nothing is lost.
  [[nodiscard]] bool is_passthrough() const;

  /// Same profile with every duration multiplied by `factor`.
  [[nodiscard]] NetProfile scaled(double factor) const;

  /// Expected one-way delay of a single leg.
  [[nodiscard]] Duration mean_delay() const;
};

/// Named presets: none, lan, 4g, 3g. Throws UnknownPreset.
NetProfile preset(std::string_view name, std::uint64_t seed = 0);

/// Either {"profile": "<preset>", "seed": N} or an inline profile object.
NetProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const NetProfile& p);

/// Seed of the independent random stream of one link.
std::uint64_t link_seed(std::uint64_t seed, std::string_view link_id);

/// Deterministic per-link delay and loss draws.
class DelaySampler {
 public:
  DelaySampler(const NetProfile& profile, std::string_view link_id);

  /// base + jitter, clamped at zero.
  Duration sample();
  /// One Bernoulli(loss_prob) draw.
  bool lost();

  [[nodiscard]] const NetProfile& profile() const { return profile_; }

 private:
  NetProfile profile_;
  std::mt19937_64 delay_rng_;
  std::mt19937_64 loss_rng_;
};

}  // namespace smb::netem
