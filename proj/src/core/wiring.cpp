#include "smb/core/wiring.hpp"

#include <fstream>
#include <map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "smb/error.hpp"

namespace smb {

std::vector<std::string> WiringConfig::downstream_of(const std::string& output) const {
  std::vector<std::string> out;
  for (const auto& l : links) {
    if (l.from == output) out.push_back(l.to);
  }
  return out;
}

std::string WiringConfig::upstream_of(const std::string& input) const {
  for (const auto& l : links) {
    if (l.to == input) return l.from;
  }
  return {};
}

WiringConfig validate_wiring(const WiringConfig& wiring, const std::set<SignalId>& known) {
  std::map<std::string, Direction> directions;
  for (const auto& s : known) directions[s.name] = s.direction;

  auto direction_of = [&](const std::string& name) {
    auto it = directions.find(name);
    if (it == directions.end()) {
      throw Error(ErrorCode::UnknownSignal, "'" + name + "' is not declared by any endpoint");
    }
    return it->second;
  };

  std::map<std::string, std::string> driver;
  for (const auto& l : wiring.links) {
    if (direction_of(l.from) != Direction::output) {
      throw Error(ErrorCode::DirectionMismatch, "link source '" + l.from + "' is not an output");
    }
    if (direction_of(l.to) != Direction::input) {
      throw Error(ErrorCode::DirectionMismatch, "link target '" + l.to + "' is not an input");
    }
    if (l.from == l.to) {
      throw Error(ErrorCode::SelfLink, "'" + l.from + "' is wired to itself");
    }
    auto [it, inserted] = driver.emplace(l.to, l.from);
    if (!inserted && wiring.mode == WiringMode::strict) {
      throw Error(ErrorCode::DuplicateInputDriver,
                  "'" + l.to + "' driven by both '" + it->second + "' and '" + l.from + "'");
    }
  }
  if (wiring.mode == WiringMode::strict) {
    for (const auto& [name, dir] : directions) {
      if (dir == Direction::input && !wiring.links.empty() && !driver.contains(name)) {
        // Declared inputs without a driver are allowed only in an empty scenario.
        throw Error(ErrorCode::UndrivenInput, "input '" + name + "' has no upstream output");
      }
    }
  }
  return wiring;
}

WiringConfig wiring_from_json(const nlohmann::json& j) {
  WiringConfig w;
  if (!j.is_object() || !j.contains("links") || !j.at("links").is_array()) {
    throw Error(ErrorCode::ConfigInvalid, "wiring needs a 'links' array");
  }
  for (const auto& l : j.at("links")) {
    if (!l.contains("from") || !l.contains("to")) {
      throw Error(ErrorCode::ConfigInvalid, "wiring link needs 'from' and 'to'");
    }
    w.links.push_back({l.at("from").get<std::string>(), l.at("to").get<std::string>()});
  }
  if (j.contains("mode")) {
    auto mode = j.at("mode").get<std::string>();
    if (mode == "strict") {
      w.mode = WiringMode::strict;
    } else if (mode == "permissive") {
      w.mode = WiringMode::permissive;
    } else {
      throw Error(ErrorCode::ConfigInvalid, "unknown wiring mode '" + mode + "'");
    }
  }
  return w;
}

nlohmann::json wiring_to_json(const WiringConfig& w) {
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : w.links) links.push_back({{"from", l.from}, {"to", l.to}});
  return {{"links", links}, {"mode", w.mode == WiringMode::strict ? "strict" : "permissive"}};
}

WiringConfig load_wiring(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open " + path.string());
  try {
    return wiring_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, path.string() + ": " + e.what());
  }
}

std::string task_output(int task) { return fmt::format("task{:02d}/out", task); }
std::string task_input(int task) { return fmt::format("task{:02d}/in", task); }
std::string drts_input(int pair) { return fmt::format("drts/in{:02d}", pair); }
std::string drts_output(int pair) { return fmt::format("drts/out{:02d}", pair); }

WiringConfig echo_wiring(int tasks) {
  WiringConfig w;
  for (int i = 1; i <= tasks; ++i) {
    w.links.push_back({task_output(i), drts_input(i)});
    w.links.push_back({drts_output(i), task_input(i)});
  }
  return w;
}

std::set<SignalId> echo_signals(int tasks) {
  std::set<SignalId> s;
  for (int i = 1; i <= tasks; ++i) {
    s.insert(SignalId::output(task_output(i)));
    s.insert(SignalId::input(task_input(i)));
    s.insert(SignalId::input(drts_input(i)));
    s.insert(SignalId::output(drts_output(i)));
  }
  return s;
}

}  // namespace smb
