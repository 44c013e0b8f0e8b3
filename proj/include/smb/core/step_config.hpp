#pragma once

#include <chrono>

#include "smb/core/time.hpp"

namespace smb {

using namespace std::chrono_literals;

/// Time step hierarchy of a co-simulation: offline tasks, the bus, the
/// real-time simulator and (informational) the controller interface.
struct StepConfig {
  Duration offline_step = 500ms;
  Duration bus_min_step = 1ms;
  Duration drts_step = 1ms;
  Duration comm_step = 10ms;
  Duration controller_iface_step = 10us;

  /// Throws InvalidArgument when a step is out of range or the
  /// offline >= bus >= drts ordering is broken.
  void validate() const;
};

}  // namespace smb
