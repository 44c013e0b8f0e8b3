#include "smb/opf/admm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "smb/error.hpp"

namespace smb::opf {

void AdmmConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be at least 1");
  if (!linearized) throw Error(ErrorCode::InvalidArgument, "only the linearised model is supported");
  if (compute_delay < Duration::zero()) throw Error(ErrorCode::InvalidArgument, "negative compute delay");
  if (neighbor_timeout <= Duration::zero()) throw Error(ErrorCode::InvalidArgument, "neighbour timeout must be positive");
}

double edge_rho(double rho, double g) { return rho * g * g; }

LocalProblem local_problem(const DcNetwork& net, int id) {
  LocalProblem lp;
  lp.node = net.node(id);
  lp.is_ref = id == net.ref;
  lp.neighbors = net.neighbors(id);
  return lp;
}

AgentState init_agent(const LocalProblem& local) {
  AgentState s;
  s.id = local.node.id;
  for (const auto& [nb, g] : local.neighbors) s.edges.emplace(nb, EdgeState{});
  return s;
}

std::vector<BoundaryMessage> agent_local_step(AgentState& state, const LocalProblem& local, double rho) {
  const auto& node = local.node;
  if (local.neighbors.empty()) throw Error(ErrorCode::LocalInfeasible, fmt::format("node {} has no neighbours", node.id));

  // Targets each variable is pulled towards by the penalty.
  double gsum = 0.0, w0 = 0.0, c0 = 0.0, sum_gc = 0.0, sum_g2 = 0.0;
  for (const auto& [nb, g] : local.neighbors) {
    const auto& e = state.edges.at(nb);
    const double re = edge_rho(rho, g);
    gsum += g;
    w0 += re;
    c0 += re * e.z_self - e.dual_self;
    double cj = e.z_neighbor - e.dual_neighbor / re;
    sum_gc += g * cj;
    sum_g2 += g * g / re;
  }
  c0 /= w0;

  // Flow balance p - d - G u0 + sum g_j u_j = 0 with u0 = c0 + mu G / w0 and
  // u_j = c_j - mu g_j / rho_e gives p(mu) + r - mu S = 0.
  const double u0_target = local.is_ref ? 1.0 : c0;
  const double r = -node.d - gsum * u0_target + sum_gc;
  const double s = (local.is_ref ? 0.0 : gsum * gsum / w0) + sum_g2;
  if (!(s > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::LocalInfeasible, fmt::format("node {}: degenerate local step", node.id));
  }

  double mu = 0.0, p = 0.0;
  if (node.kind == NodeKind::load) {
    mu = r / s;
  } else {
    if (node.pmin > node.pmax) throw Error(ErrorCode::LocalInfeasible, fmt::format("node {}: pmin > pmax", node.id));
    const double inv2a = 1.0 / (2.0 * node.a);
    mu = (r - node.b * inv2a) / (s + inv2a);
    p = -(node.b + mu) * inv2a;
    if (p > node.pmax) {
      p = node.pmax;
      mu = (p + r) / s;
    } else if (p < node.pmin) {
      p = node.pmin;
      mu = (p + r) / s;
    }
  }

  state.mu = mu;
  state.p = p;
  state.v = local.is_ref ? 1.0 : c0 + mu * gsum / w0;
  std::vector<BoundaryMessage> out;
  out.reserve(local.neighbors.size());
  for (const auto& [nb, g] : local.neighbors) {
    auto& e = state.edges.at(nb);
    const double re = edge_rho(rho, g);
    e.copy = (e.z_neighbor - e.dual_neighbor / re) - mu * g / re;
    out.push_back(BoundaryMessage{state.id, nb, state.k, state.v + e.dual_self / re,
                                  e.copy + e.dual_neighbor / re});
  }
  return out;
}

Residuals agent_correct_step(AgentState& state, const LocalProblem& local,
                             const std::vector<BoundaryMessage>& received, double rho) {
  Residuals res;
  for (const auto& [nb, g] : local.neighbors) {
    auto& e = state.edges.at(nb);
    const double re = edge_rho(rho, g);
    auto it = std::find_if(received.begin(), received.end(), [&](const BoundaryMessage& m) {
      return m.from == nb && m.to == state.id && m.iteration == state.k;
    });
    if (it == received.end()) {
      throw Error(ErrorCode::MissingNeighborMessage,
                  fmt::format("agent {} has no iteration {} message from {}", state.id, state.k, nb));
    }
    const double own_self = state.v + e.dual_self / re;
    const double own_copy = e.copy + e.dual_neighbor / re;
    const double z_self = (own_self + it->copy_value) / 2.0;
    const double z_neighbor = (own_copy + it->self_value) / 2.0;

    res.dual = std::max({res.dual, re * std::abs(z_self - e.z_self), re * std::abs(z_neighbor - e.z_neighbor)});
    e.z_self = z_self;
    e.z_neighbor = z_neighbor;
    const double r_self = state.v - z_self;
    const double r_neighbor = e.copy - z_neighbor;
    e.dual_self += re * r_self;
    e.dual_neighbor += re * r_neighbor;
    res.primal = std::max({res.primal, std::abs(r_self), std::abs(r_neighbor)});
  }
  ++state.k;
  return res;
}

AdmmResult solve_admm(const DcNetwork& net, const AdmmConfig& cfg) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  std::vector<LocalProblem> locals;
  std::vector<AgentState> agents;
  for (const auto& n : net.nodes) {
    locals.push_back(local_problem(net, n.id));
    agents.push_back(init_agent(locals.back()));
  }

  AdmmResult result;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    std::vector<BoundaryMessage> mail;
    for (std::size_t k = 0; k < agents.size(); ++k) {
      auto msgs = agent_local_step(agents[k], locals[k], cfg.rho);
      mail.insert(mail.end(), msgs.begin(), msgs.end());
    }
    ResidualPoint point{it, 0.0, 0.0};
    for (std::size_t k = 0; k < agents.size(); ++k) {
      auto r = agent_correct_step(agents[k], locals[k], mail, cfg.rho);
      point.primal = std::max(point.primal, r.primal);
      point.dual = std::max(point.dual, r.dual);
    }
    result.residuals.push_back(point);
    result.iterations = it;
    if (point.primal < cfg.tol) {
      result.converged = true;
      break;
    }
  }

  for (const auto& a : agents) {
    result.solution.v[a.id] = a.v;
    result.solution.p[a.id] = a.p;
    result.solution.multiplier[a.id] = a.mu;
  }
  result.solution.objective = objective_of(net, result.solution.p);
  result.wall_time = std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() - t0);
  return result;
}

}  // namespace smb::opf
