#pragma once

#include <chrono>
#include <compare>
#include <cstdint>

#include "smb/error.hpp"

namespace smb {

using Duration = std::chrono::nanoseconds;

enum class ClockDomain { wall, sim };

/// Nanoseconds since scenario start in one clock domain. Values from
/// different domains never compare; doing so throws MixedClockDomain.
class Timestamp {
 public:
  constexpr Timestamp() = default;
  constexpr Timestamp(ClockDomain clock, std::uint64_t nanos) : clock_(clock), nanos_(nanos) {}

  static constexpr Timestamp wall(std::uint64_t nanos) { return {ClockDomain::wall, nanos}; }
  static constexpr Timestamp sim(std::uint64_t nanos) { return {ClockDomain::sim, nanos}; }
  static constexpr Timestamp sim(Duration d) {
    return {ClockDomain::sim, static_cast<std::uint64_t>(d.count())};
  }

  [[nodiscard]] constexpr ClockDomain clock() const { return clock_; }
  [[nodiscard]] constexpr std::uint64_t nanos() const { return nanos_; }
  [[nodiscard]] constexpr Duration since_start() const {
    return Duration(static_cast<Duration::rep>(nanos_));
  }

  [[nodiscard]] Timestamp operator+(Duration d) const {
    return {clock_, nanos_ + static_cast<std::uint64_t>(d.count())};
  }

  /// Signed difference this - other; throws MixedClockDomain.
  [[nodiscard]] Duration operator-(const Timestamp& other) const {
    require_same_domain(other);
    return Duration(static_cast<Duration::rep>(nanos_) - static_cast<Duration::rep>(other.nanos_));
  }

  std::strong_ordering operator<=>(const Timestamp& other) const {
    require_same_domain(other);
    return nanos_ <=> other.nanos_;
  }
  bool operator==(const Timestamp& other) const {
    require_same_domain(other);
    return nanos_ == other.nanos_;
  }

 private:
  void require_same_domain(const Timestamp& other) const {
    if (clock_ != other.clock_) {
      throw Error(ErrorCode::MixedClockDomain, "wall and sim timestamps are not comparable");
    }
  }

  ClockDomain clock_ = ClockDomain::wall;
  std::uint64_t nanos_ = 0;
};

inline double to_ms(Duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

inline Duration from_ms(double ms) {
  return std::chrono::duration_cast<Duration>(std::chrono::duration<double, std::milli>(ms));
}

}  // namespace smb
