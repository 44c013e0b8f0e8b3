#pragma once

#include <string>
#include <vector>

#include "smb/core/endpoint.hpp"
#include "smb/core/wiring.hpp"
#include "smb/opf/admm.hpp"
#include "smb/runtime/deployment.hpp"

namespace smb::opf {

/// Signal names of the agent exchange. Agent i publishes its own voltage and
/// its copy of j's voltage on agentII/toJJ/{self,copy}; they arrive on
/// agentJJ/fromII/{self,copy}. Residuals go to the monitor, which answers
/// with the iteration to stop at.
std::string agent_name(int id);
std::string to_neighbor(int from, int to, bool self);
std::string from_neighbor(int at, int from, bool self);
std::string residual_output(int id, bool primal);
std::string residual_input(int id, bool primal);
std::string stop_input(int id);
inline constexpr const char* kMonitor = "monitor";
inline constexpr const char* kStopOutput = "monitor/stop";

WiringConfig opf_wiring(const DcNetwork& net);
std::vector<runtime::ComponentSpec> opf_components(const DcNetwork& net);

struct DistributedOptions {
  runtime::DeploymentOptions deployment;
  AdmmConfig admm;
  /// Observes every record an agent or the monitor sends.
  SendTrace trace;
};

/// One agent per node plus a monitor, each on its own thread, exchanging
/// over the deployment's transport. Agents run the same steps as
/// solve_admm and visit neighbours in id order, so the answer does not
/// depend on delays. The run stops at the first iteration where the
/// monitor sees both residuals below tol, or at max_iter (converged =
/// false). wall_time runs from the agents' start to the monitor's decision.
/// Loss is forced off. Throws MissingNeighborMessage or TransportDown.
AdmmResult run_distributed_opf(const DcNetwork& net, const DistributedOptions& options);

}  // namespace smb::opf
