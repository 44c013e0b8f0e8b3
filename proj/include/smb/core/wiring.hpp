#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smb/core/signal.hpp"

namespace smb {

struct WiringLink {
  std::string from;  // output signal
  std::string to;    // input signal

  friend bool operator==(const WiringLink&, const WiringLink&) = default;
};

enum class WiringMode { strict, permissive };

struct WiringConfig {
  std::vector<WiringLink> links;
  WiringMode mode = WiringMode::strict;

  /// Inputs driven by `output`, in link order.
  [[nodiscard]] std::vector<std::string> downstream_of(const std::string& output) const;
  /// Output driving `input`, or empty when unwired.
  [[nodiscard]] std::string upstream_of(const std::string& input) const;
};

/// Checks every link against the declared signals. Errors: UnknownSignal,
/// DirectionMismatch, DuplicateInputDriver (strict only), SelfLink.
WiringConfig validate_wiring(const WiringConfig& wiring, const std::set<SignalId>& known);

WiringConfig wiring_from_json(const nlohmann::json& j);
nlohmann::json wiring_to_json(const WiringConfig& w);
WiringConfig load_wiring(const std::filesystem::path& path);

/// Signal names of the echo benchmark: task i owns taskNN/out and taskNN/in,
/// the simulator owns drts/inNN and drts/outNN.
std::string task_output(int task);
std::string task_input(int task);
std::string drts_input(int pair);
std::string drts_output(int pair);

/// The fully wired echo loop: taskNN/out -> drts/inNN, drts/outNN -> taskNN/in.
WiringConfig echo_wiring(int tasks);
std::set<SignalId> echo_signals(int tasks);

}  // namespace smb
