#include "smb/core/signal.hpp"

#include <algorithm>

#include "smb/error.hpp"

namespace smb {

bool is_valid_signal_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.' || c == '/' || c == '-';
  });
}

SignalId::SignalId(std::string n, Direction d) : name(std::move(n)), direction(d) {
  if (!is_valid_signal_name(name)) {
    throw Error(ErrorCode::InvalidArgument, "bad signal name '" + name + "'");
  }
}

}  // namespace smb
