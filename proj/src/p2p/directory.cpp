#include "smb/p2p/directory.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "smb/error.hpp"

namespace smb::p2p {

void PeerDirectory::add(const std::string& signal, const wire::HostPort& owner) {
  auto [it, inserted] = owners_.emplace(signal, owner);
  if (!inserted && !(it->second == owner)) {
    throw Error(ErrorCode::InvalidArgument, "'" + signal + "' already owned by " + it->second.str());
  }
}

const wire::HostPort& PeerDirectory::owner(const std::string& signal) const {
  auto it = owners_.find(signal);
  if (it == owners_.end()) throw Error(ErrorCode::UnknownSignal, "'" + signal + "' has no owner");
  return it->second;
}

PeerDirectory PeerDirectory::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "directory must be a JSON object");
  PeerDirectory d;
  for (const auto& [name, addr] : j.items()) {
    if (!addr.is_string()) throw Error(ErrorCode::ConfigInvalid, "address of '" + name + "' must be a string");
    d.add(name, wire::HostPort::parse(addr.get<std::string>()));
  }
  return d;
}

nlohmann::json PeerDirectory::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, addr] : owners_) j[name] = addr.str();
  return j;
}

PeerDirectory PeerDirectory::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, path.string() + ": " + e.what());
  }
}

}  // namespace smb::p2p
