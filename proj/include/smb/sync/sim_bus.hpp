#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "smb/core/signal.hpp"
#include "smb/core/wiring.hpp"
#include "smb/netem/profile.hpp"
#include "smb/sync/coordinator.hpp"

namespace smb::sync {

/// One record observed by a component, for causality and determinism checks.
struct SimTraceEntry {
  std::string component;
  Timestamp granted;
  std::string signal;
  double value = 0.0;
  Timestamp send_ts;
  Timestamp due;
  std::uint64_t seq = 0;
};

/// In-process transport in simulated time. A record sent at the sender's
/// granted time t on link (output -> input) becomes due at
/// max(t + lookahead + sampled delay, previous due on that link), and is
/// handed to the receiver only once its granted time reaches the due time.
/// Combined with the coordinator's safety rule this makes every component's
/// input sequence independent of thread scheduling.
class SimBus {
 public:
  class Port;

  SimBus(Coordinator& coordinator, WiringConfig wiring, netem::NetProfile profile);

  void declare(const std::string& component, std::vector<std::string> inputs,
               std::vector<std::string> outputs, Duration lookahead);
  /// Registers every declared component with upstreams derived from the wiring.
  void start();

  Port port(const std::string& component);

  [[nodiscard]] std::vector<SimTraceEntry> trace() const;
  [[nodiscard]] Coordinator& coordinator() { return coordinator_; }

 private:
  struct Due {
    Timestamp due;
    std::string input;
    std::uint64_t seq;
    SignalRecord rec;
    bool operator<(const Due& o) const {
      return std::tie(due, input, seq) < std::tie(o.due, o.input, o.seq);
    }
  };
  struct Component {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    Duration lookahead{0};
    std::multiset<Due> inbox;
  };
  struct LinkState {
    std::unique_ptr<netem::DelaySampler> sampler;
    Timestamp last_due = Timestamp::sim(0);
  };

  void send(const std::string& component, SignalRecord rec);
  std::vector<SignalRecord> drain(const std::string& component);

  Coordinator& coordinator_;
  WiringConfig wiring_;
  netem::NetProfile profile_;
  mutable std::mutex mutex_;
  std::map<std::string, Component> components_;
  std::map<std::string, std::string> owner_of_input_;
  std::map<std::string, LinkState> links_;
  std::vector<SimTraceEntry> trace_;
};

/// A component's handle on the bus.
class SimBus::Port {
 public:
  /// Requests granted + step; blocks until safe.
  Timestamp advance(Duration step);
  Timestamp advance_to(Timestamp t);
  /// Stamps rec.send_ts with the granted time and routes it.
  void send(SignalRecord rec);
  /// Records due at or before the granted time, in (due, input, seq) order.
  std::vector<SignalRecord> drain();
  [[nodiscard]] Timestamp now() const;
  void resign();
  [[nodiscard]] const std::string& id() const { return id_; }

 private:
  friend class SimBus;
  Port(SimBus& bus, std::string id) : bus_(&bus), id_(std::move(id)) {}
  SimBus* bus_;
  std::string id_;
};

}  // namespace smb::sync
