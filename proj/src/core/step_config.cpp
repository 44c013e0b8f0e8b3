#include "smb/core/step_config.hpp"

#include "smb/error.hpp"

namespace smb {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace

void StepConfig::validate() const {
  require(offline_step > Duration::zero() && bus_min_step > Duration::zero() &&
              drts_step > Duration::zero() && comm_step > Duration::zero() &&
              controller_iface_step > Duration::zero(),
          "step sizes must be strictly positive");
  require(offline_step >= 100ms && offline_step <= 2s, "offline_step outside [100 ms, 2 s]");
  require(drts_step >= 100ns && drts_step <= 1ms, "drts_step outside [100 ns, 1 ms]");
  require(controller_iface_step <= 10us, "controller_iface_step above 10 us");
  require(offline_step >= bus_min_step && bus_min_step >= drts_step,
          "expected offline_step >= bus_min_step >= drts_step");
}

}  // namespace smb
