#pragma once

#include <chrono>
#include <map>
#include <vector>

#include "smb/core/time.hpp"
#include "smb/opf/network.hpp"
#include "smb/opf/oracle.hpp"

namespace smb::opf {

struct AdmmConfig {
  double rho = 1.0;
  /// Stop once both the primal and the dual residual fall below this.
  double tol = 1e-4;
  int max_iter = 1000;
  bool linearized = true;
  /// Emulated local computation time per iteration.
  Duration compute_delay{0};
  /// How long an agent waits for a neighbour's message before giving up.
  Duration neighbor_timeout = std::chrono::seconds(30);

  /// Throws InvalidArgument.
  void validate() const;
};

/// The electrical facts an agent knows about its own node.
struct LocalProblem {
  Node node;
  bool is_ref = false;
  /// (neighbour id, conductance) sorted by id.
  std::vector<std::pair<int, double>> neighbors;
};

LocalProblem local_problem(const DcNetwork& net, int id);

/// Penalty weight of one edge: rho g^2, so the penalty is measured in units
/// of power flow and one rho suits any conductance range.
double edge_rho(double rho, double g);

/// Per-edge consensus state kept by one agent, for the edge to `neighbor`.
struct EdgeState {
  double copy = 1.0;       // this agent's copy of the neighbour's voltage
  double z_self = 1.0;     // consensus value of this node's voltage on the edge
  double z_neighbor = 1.0; // consensus value of the neighbour's voltage
  double dual_self = 0.0;
  double dual_neighbor = 0.0;
};

struct AgentState {
  int id = 0;
  double v = 1.0;
  double p = 0.0;
  /// Multiplier of the local flow-balance row from the last local step.
  double mu = 0.0;
  std::map<int, EdgeState> edges;
  int k = 0;
};

/// What agent `from` tells neighbour `to` after its local step: its own
/// voltage and its copy of the neighbour's, each shifted by the scaled dual.
struct BoundaryMessage {
  int from = 0;
  int to = 0;
  int iteration = 0;
  double self_value = 0.0;
  double copy_value = 0.0;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
};

/// Flat start: voltages and copies at 1.0 pu, duals at zero.
AgentState init_agent(const LocalProblem& local);

/// Minimises the local cost plus the consensus penalty subject to the node's
/// flow balance and limits (closed form, piecewise linear in the
/// multiplier). Returns one message per neighbour, in id order. Throws
/// LocalInfeasible.
std::vector<BoundaryMessage> agent_local_step(AgentState& state, const LocalProblem& local, double rho);

/// Averages each edge's values with the neighbour's message, then
/// dual += rho (own - consensus). Advances k. Throws MissingNeighborMessage.
Residuals agent_correct_step(AgentState& state, const LocalProblem& local,
                             const std::vector<BoundaryMessage>& received, double rho);

struct ResidualPoint {
  int iteration = 0;
  double primal = 0.0;
  double dual = 0.0;
};

struct AdmmResult {
  OpfSolution solution;
  int iterations = 0;
  bool converged = false;
  std::vector<ResidualPoint> residuals;
  Duration wall_time{0};
};

/// All agents in one thread, in lock step. Reference for the bus-based run.
AdmmResult solve_admm(const DcNetwork& net, const AdmmConfig& cfg);

}  // namespace smb::opf
