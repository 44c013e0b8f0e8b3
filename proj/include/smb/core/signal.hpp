#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>

#include "smb/core/time.hpp"

namespace smb {

enum class Direction { input, output };

/// True when `name` is non-empty and made only of [A-Za-z0-9_./-].
bool is_valid_signal_name(std::string_view name);

struct SignalId {
  std::string name;
  Direction direction = Direction::output;

  SignalId() = default;
  /// Throws InvalidArgument on a malformed name.
  SignalId(std::string name, Direction direction);

  static SignalId input(std::string name) { return {std::move(name), Direction::input}; }
  static SignalId output(std::string name) { return {std::move(name), Direction::output}; }

  friend bool operator==(const SignalId&, const SignalId&) = default;
  friend auto operator<=>(const SignalId& a, const SignalId& b) {
    return std::tie(a.name, a.direction) <=> std::tie(b.name, b.direction);
  }
};

/// One timestamped scalar sample on a named signal.
struct SignalRecord {
  std::string signal;
  double value = 0.0;
  Timestamp send_ts;
  std::uint64_t seq = 0;
};

}  // namespace smb
