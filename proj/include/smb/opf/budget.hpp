#pragma once

#include <cstddef>
#include <vector>

#include "smb/netem/profile.hpp"
#include "smb/opf/network.hpp"

namespace smb::opf {

struct BudgetModel {
  /// Shaped legs a boundary message crosses: 2 through a broker, 1 peer to peer.
  int legs_per_message = 2;
  /// Time an agent spends on its local step each iteration.
  Duration compute_allowance{0};
};

/// Expected maximum of `m` independent message delays, each the sum of
/// `legs` independent draws from the profile. Computed by numerical
/// integration of the delay distribution.
Duration expected_max_delay(const netem::NetProfile& profile, int legs, std::size_t m);

/// Predicted wall time of `iterations` synchronous ADMM iterations: each
/// costs the compute allowance plus the slowest of the iteration's
/// neighbour messages (one per directed edge).
Duration latency_budget_oracle(const netem::NetProfile& profile, int iterations,
                               const DcNetwork& topology, const BudgetModel& model);

struct RatioTarget {
  netem::NetProfile profile;
  /// Desired wall time relative to the baseline profile.
  double ratio = 1.0;
};

/// Compute allowance that brings the predicted wall-time ratios of the
/// targets over the baseline closest to the desired ones (least squares
/// in log ratio). Searches [0, max_allowance].
Duration calibrate_compute_allowance(const netem::NetProfile& baseline, const std::vector<RatioTarget>& targets,
                                     const DcNetwork& topology, int legs_per_message,
                                     Duration max_allowance = std::chrono::seconds(10));

}  // namespace smb::opf
