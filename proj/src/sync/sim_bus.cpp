#include "smb/sync/sim_bus.hpp"

#include <algorithm>

#include "smb/error.hpp"

namespace smb::sync {

SimBus::SimBus(Coordinator& coordinator, WiringConfig wiring, netem::NetProfile profile)
    : coordinator_(coordinator), wiring_(std::move(wiring)), profile_(std::move(profile)) {
  profile_.validate();
}

void SimBus::declare(const std::string& component, std::vector<std::string> inputs,
                     std::vector<std::string> outputs, Duration lookahead) {
  std::lock_guard lock(mutex_);
  for (const auto& in : inputs) owner_of_input_[in] = component;
  auto& c = components_[component];
  c.inputs = std::move(inputs);
  c.outputs = std::move(outputs);
  c.lookahead = lookahead;
}

void SimBus::start() {
  std::map<std::string, std::string> owner_of_output;
  std::map<std::string, Component> snapshot;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [id, c] : components_) {
      for (const auto& out : c.outputs) owner_of_output[out] = id;
    }
    snapshot = components_;
  }
  for (const auto& [id, c] : snapshot) {
    std::set<std::string> upstreams;
    for (const auto& in : c.inputs) {
      auto up = wiring_.upstream_of(in);
      if (up.empty()) continue;
      auto it = owner_of_output.find(up);
      if (it == owner_of_output.end()) throw Error(ErrorCode::UnknownSignal, "no component owns '" + up + "'");
      if (it->second != id) upstreams.insert(it->second);
    }
    coordinator_.register_component(id, std::move(upstreams), c.lookahead);
  }
}

SimBus::Port SimBus::port(const std::string& component) {
  std::lock_guard lock(mutex_);
  if (!components_.contains(component)) {
    throw Error(ErrorCode::UnknownComponent, "'" + component + "' was not declared");
  }
  return Port(*this, component);
}

void SimBus::send(const std::string& component, SignalRecord rec) {
  Timestamp now = coordinator_.granted(component);
  std::lock_guard lock(mutex_);
  const auto& sender = components_.at(component);
  if (std::find(sender.outputs.begin(), sender.outputs.end(), rec.signal) == sender.outputs.end()) {
    throw Error(ErrorCode::UnknownSignal, "'" + rec.signal + "' is not an output of " + component);
  }
  rec.send_ts = now;
  for (const auto& to : wiring_.downstream_of(rec.signal)) {
    auto owner = owner_of_input_.find(to);
    if (owner == owner_of_input_.end()) continue;
    std::string link_id = rec.signal + "->" + to;
    auto& link = links_[link_id];
    if (!link.sampler) link.sampler = std::make_unique<netem::DelaySampler>(profile_, link_id);
    if (link.sampler->lost()) continue;
    Timestamp due = now + sender.lookahead + link.sampler->sample();
    if (due < link.last_due) due = link.last_due;
    link.last_due = due;
    SignalRecord delivered = rec;
    delivered.signal = to;
    components_.at(owner->second).inbox.insert(Due{due, to, rec.seq, std::move(delivered)});
  }
}

std::vector<SignalRecord> SimBus::drain(const std::string& component) {
  Timestamp now = coordinator_.granted(component);
  std::lock_guard lock(mutex_);
  auto& inbox = components_.at(component).inbox;
  std::vector<SignalRecord> out;
  while (!inbox.empty() && inbox.begin()->due <= now) {
    const auto& d = *inbox.begin();
    trace_.push_back({component, now, d.rec.signal, d.rec.value, d.rec.send_ts, d.due, d.rec.seq});
    out.push_back(d.rec);
    inbox.erase(inbox.begin());
  }
  return out;
}

std::vector<SimTraceEntry> SimBus::trace() const {
  std::lock_guard lock(mutex_);
  return trace_;
}

Timestamp SimBus::Port::advance(Duration step) {
  return bus_->coordinator_.request_advance(id_, bus_->coordinator_.granted(id_) + step);
}

Timestamp SimBus::Port::advance_to(Timestamp t) { return bus_->coordinator_.request_advance(id_, t); }

void SimBus::Port::send(SignalRecord rec) { bus_->send(id_, std::move(rec)); }

std::vector<SignalRecord> SimBus::Port::drain() { return bus_->drain(id_); }

Timestamp SimBus::Port::now() const { return bus_->coordinator_.granted(id_); }

void SimBus::Port::resign() { bus_->coordinator_.resign(id_); }

}  // namespace smb::sync
