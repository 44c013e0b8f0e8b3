#include "smb/core/clock.hpp"

#include "smb/error.hpp"

namespace smb {

Timestamp ScenarioClock::now(ClockDomain domain) const {
  if (domain == ClockDomain::wall) {
    auto elapsed = std::chrono::duration_cast<Duration>(Steady::now() - start_);
    return Timestamp::wall(static_cast<std::uint64_t>(std::max<Duration::rep>(0, elapsed.count())));
  }
  if (source_ == nullptr) {
    throw Error(ErrorCode::NoCoordinator, "sim clock read without a coordinator");
  }
  return source_->granted(component_);
}

}  // namespace smb
