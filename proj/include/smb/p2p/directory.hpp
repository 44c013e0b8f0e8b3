#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "smb/wire/socket.hpp"

namespace smb::p2p {

/// Static map from signal name to the address of the server owning it.
class PeerDirectory {
 public:
  PeerDirectory() = default;

  /// Throws InvalidArgument when `signal` already has an owner.
  void add(const std::string& signal, const wire::HostPort& owner);
  /// Throws UnknownSignal.
  [[nodiscard]] const wire::HostPort& owner(const std::string& signal) const;
  [[nodiscard]] bool contains(const std::string& signal) const { return owners_.contains(signal); }
  [[nodiscard]] const std::map<std::string, wire::HostPort>& entries() const { return owners_; }

  static PeerDirectory from_json(const nlohmann::json& j);
  [[nodiscard]] nlohmann::json to_json() const;
  static PeerDirectory load(const std::filesystem::path& path);

 private:
  std::map<std::string, wire::HostPort> owners_;
};

}  // namespace smb::p2p
