#include "smb/opf/distributed.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "smb/error.hpp"

namespace smb::opf {

std::string agent_name(int id) { return fmt::format("agent{:02d}", id); }
std::string to_neighbor(int from, int to, bool self) {
  return fmt::format("agent{:02d}/to{:02d}/{}", from, to, self ? "self" : "copy");
}
std::string from_neighbor(int at, int from, bool self) {
  return fmt::format("agent{:02d}/from{:02d}/{}", at, from, self ? "self" : "copy");
}
std::string residual_output(int id, bool primal) {
  return fmt::format("agent{:02d}/{}", id, primal ? "primal" : "dual");
}
std::string residual_input(int id, bool primal) {
  return fmt::format("monitor/{}{:02d}", primal ? "primal" : "dual", id);
}
std::string stop_input(int id) { return fmt::format("agent{:02d}/stop", id); }

WiringConfig opf_wiring(const DcNetwork& net) {
  WiringConfig w;
  for (const auto& n : net.nodes) {
    for (const auto& [nb, g] : net.neighbors(n.id)) {
      for (bool self : {true, false}) w.links.push_back({to_neighbor(n.id, nb, self), from_neighbor(nb, n.id, self)});
    }
    for (bool primal : {true, false}) w.links.push_back({residual_output(n.id, primal), residual_input(n.id, primal)});
    w.links.push_back({kStopOutput, stop_input(n.id)});
  }
  return w;
}

std::vector<runtime::ComponentSpec> opf_components(const DcNetwork& net) {
  std::vector<runtime::ComponentSpec> out;
  runtime::ComponentSpec monitor{kMonitor, {}, {kStopOutput}};
  for (const auto& n : net.nodes) {
    runtime::ComponentSpec agent{agent_name(n.id), {stop_input(n.id)}, {}};
    for (const auto& [nb, g] : net.neighbors(n.id)) {
      for (bool self : {true, false}) {
        agent.inputs.push_back(from_neighbor(n.id, nb, self));
        agent.outputs.push_back(to_neighbor(n.id, nb, self));
      }
    }
    for (bool primal : {true, false}) {
      agent.outputs.push_back(residual_output(n.id, primal));
      monitor.inputs.push_back(residual_input(n.id, primal));
    }
    out.push_back(std::move(agent));
  }
  out.push_back(std::move(monitor));
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr auto kPoll = std::chrono::milliseconds(50);

struct Snapshot {
  double v = 0.0;
  double p = 0.0;
  double mu = 0.0;
};

struct Shared {
  std::atomic<bool> abort{false};
  std::mutex mutex;
  std::exception_ptr error;

  void fail() {
    std::lock_guard lock(mutex);
    if (!error) error = std::current_exception();
    abort = true;
  }
};

/// Where an agent's input comes from.
struct Inbound {
  enum Kind { self, copy, stop } kind = stop;
  int neighbor = 0;
};

class Agent {
 public:
  Agent(const DcNetwork& net, int id, Endpoint& ep, const AdmmConfig& cfg, Shared& shared)
      : local_(local_problem(net, id)), state_(init_agent(local_)), ep_(ep), cfg_(cfg), shared_(shared) {
    for (const auto& [nb, g] : local_.neighbors) {
      inbound_[from_neighbor(id, nb, true)] = {Inbound::self, nb};
      inbound_[from_neighbor(id, nb, false)] = {Inbound::copy, nb};
    }
    inbound_[stop_input(id)] = {Inbound::stop, 0};
  }

  void run() {
    const int id = state_.id;
    while (!shared_.abort) {
      if (stop_at_ && static_cast<int>(history_.size()) >= *stop_at_) break;
      if (state_.k >= cfg_.max_iter) {
        pump(Clock::now() + kPoll);
        continue;
      }
      const int k = state_.k;
      auto msgs = agent_local_step(state_, local_, cfg_.rho);
      if (cfg_.compute_delay > Duration::zero()) std::this_thread::sleep_for(cfg_.compute_delay);
      const auto seq = static_cast<std::uint64_t>(k + 1);
      for (const auto& m : msgs) {
        ep_.send(SignalRecord{to_neighbor(id, m.to, true), m.self_value, Timestamp{}, seq});
        ep_.send(SignalRecord{to_neighbor(id, m.to, false), m.copy_value, Timestamp{}, seq});
      }

      auto deadline = Clock::now() + cfg_.neighbor_timeout;
      while (!complete(k)) {
        if (shared_.abort) return;
        if (stop_at_ && static_cast<int>(history_.size()) >= *stop_at_) break;
        if (Clock::now() >= deadline) {
          throw Error(ErrorCode::MissingNeighborMessage,
                      fmt::format("{} waited too long for iteration {} messages", agent_name(id), k));
        }
        pump(std::min(deadline, Clock::now() + kPoll));
      }
      if (!complete(k)) break;  // stopped at an earlier iteration

      std::vector<BoundaryMessage> received;
      for (const auto& [nb, parts] : mail_[k]) {
        received.push_back(BoundaryMessage{nb, id, k, *parts.first, *parts.second});
      }
      mail_.erase(k);
      auto res = agent_correct_step(state_, local_, received, cfg_.rho);
      history_.push_back(Snapshot{state_.v, state_.p, state_.mu});
      ep_.send(SignalRecord{residual_output(id, true), res.primal, Timestamp{}, seq});
      ep_.send(SignalRecord{residual_output(id, false), res.dual, Timestamp{}, seq});
    }
  }

  [[nodiscard]] std::optional<Snapshot> at(int iteration) const {
    if (iteration < 1 || iteration > static_cast<int>(history_.size())) return std::nullopt;
    return history_[static_cast<std::size_t>(iteration - 1)];
  }
  [[nodiscard]] int id() const { return state_.id; }

 private:
  bool complete(int k) const {
    auto it = mail_.find(k);
    if (it == mail_.end() || it->second.size() != local_.neighbors.size()) return false;
    for (const auto& [nb, parts] : it->second) {
      if (!parts.first || !parts.second) return false;
    }
    return true;
  }

  void pump(Clock::time_point until) {
    auto wait = std::chrono::duration_cast<Duration>(until - Clock::now());
    auto rec = ep_.receive(std::max(wait, Duration::zero()));
    while (rec) {
      auto it = inbound_.find(rec->signal);
      if (it != inbound_.end()) {
        const auto& in = it->second;
        if (in.kind == Inbound::stop) {
          stop_at_ = static_cast<int>(rec->value);
        } else {
          const int k = static_cast<int>(rec->seq) - 1;
          auto& parts = mail_[k][in.neighbor];
          (in.kind == Inbound::self ? parts.first : parts.second) = rec->value;
        }
      }
      rec = ep_.receive(Duration::zero());
    }
  }

  LocalProblem local_;
  AgentState state_;
  Endpoint& ep_;
  const AdmmConfig& cfg_;
  Shared& shared_;
  std::map<std::string, Inbound> inbound_;
  std::map<int, std::map<int, std::pair<std::optional<double>, std::optional<double>>>> mail_;
  std::vector<Snapshot> history_;
  std::optional<int> stop_at_;
};

struct MonitorOutcome {
  int iterations = 0;
  bool converged = false;
  std::vector<ResidualPoint> residuals;
  Clock::time_point decided;
};

MonitorOutcome run_monitor(const DcNetwork& net, Endpoint& ep, const AdmmConfig& cfg, Shared& shared) {
  std::map<std::string, std::pair<int, bool>> inbound;
  for (const auto& n : net.nodes) {
    inbound[residual_input(n.id, true)] = {n.id, true};
    inbound[residual_input(n.id, false)] = {n.id, false};
  }
  const std::size_t expected = 2 * net.nodes.size();
  std::map<int, std::pair<std::size_t, ResidualPoint>> pending;
  MonitorOutcome out;
  int next = 1;
  auto last_progress = Clock::now();
  while (!shared.abort) {
    auto rec = ep.receive(kPoll);
    if (!rec) {
      if (Clock::now() - last_progress > cfg.neighbor_timeout + std::chrono::seconds(1)) {
        throw Error(ErrorCode::MissingNeighborMessage, fmt::format("monitor: no residuals for iteration {}", next));
      }
      continue;
    }
    auto it = inbound.find(rec->signal);
    if (it == inbound.end()) continue;
    const int k = static_cast<int>(rec->seq);
    auto& [count, point] = pending[k];
    point.iteration = k;
    if (it->second.second) point.primal = std::max(point.primal, rec->value);
    else point.dual = std::max(point.dual, rec->value);
    ++count;

    while (pending.contains(next) && pending[next].first == expected) {
      last_progress = Clock::now();
      const auto p = pending[next].second;
      pending.erase(next);
      out.residuals.push_back(p);
      const bool done = p.primal < cfg.tol;
      if (done || next >= cfg.max_iter) {
        out.decided = Clock::now();
        out.iterations = next;
        out.converged = done;
        ep.send(SignalRecord{kStopOutput, static_cast<double>(next), Timestamp{}, 1});
        return out;
      }
      ++next;
    }
  }
  return out;
}

}  // namespace

AdmmResult run_distributed_opf(const DcNetwork& net, const DistributedOptions& options) {
  options.admm.validate();
  validate_network(net);
  auto deploy_opts = options.deployment;
  deploy_opts.profile.loss_prob = 0.0;
  runtime::Deployment deployment(opf_wiring(net), opf_components(net), deploy_opts);
  if (options.trace) {
    for (const auto& c : opf_components(net)) deployment.endpoint(c.name).set_send_trace(options.trace);
  }

  Shared shared;
  std::vector<std::unique_ptr<Agent>> agents;
  for (const auto& n : net.nodes) {
    agents.push_back(std::make_unique<Agent>(net, n.id, deployment.endpoint(agent_name(n.id)), options.admm, shared));
  }

  MonitorOutcome outcome;
  const auto t0 = Clock::now();
  std::vector<std::thread> threads;
  for (auto& a : agents) {
    threads.emplace_back([&shared, agent = a.get()] {
      try {
        agent->run();
      } catch (...) {
        shared.fail();
      }
    });
  }
  threads.emplace_back([&] {
    try {
      outcome = run_monitor(net, deployment.endpoint(kMonitor), options.admm, shared);
    } catch (...) {
      shared.fail();
    }
  });
  for (auto& t : threads) t.join();
  deployment.close();
  if (shared.error) std::rethrow_exception(shared.error);

  AdmmResult result;
  result.iterations = outcome.iterations;
  result.converged = outcome.converged;
  result.residuals = std::move(outcome.residuals);
  result.wall_time = std::chrono::duration_cast<Duration>(outcome.decided - t0);
  for (const auto& a : agents) {
    auto snap = a->at(outcome.iterations);
    if (!snap) throw Error(ErrorCode::ExperimentFailed, fmt::format("{} has no state for the final iteration", agent_name(a->id())));
    result.solution.v[a->id()] = snap->v;
    result.solution.p[a->id()] = snap->p;
    result.solution.multiplier[a->id()] = snap->mu;
  }
  result.solution.objective = objective_of(net, result.solution.p);
  return result;
}

}  // namespace smb::opf
