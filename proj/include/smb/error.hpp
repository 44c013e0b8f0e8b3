#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smb {

enum class ErrorCode {
  InvalidArgument,
  // core
  UnknownSignal,
  DirectionMismatch,
  DuplicateInputDriver,
  UndrivenInput,
  SelfLink,
  NoCoordinator,
  MixedClockDomain,
  // transports
  AddressInUse,
  ConnectionRefused,
  HandshakeTimeout,
  SessionClosed,
  BadPattern,
  PeerUnreachable,
  Empty,
  TransportDown,
  TimeoutExpired,
  // sync
  DeadlockDetected,
  UnknownComponent,
  // netem
  UnknownPreset,
  AlreadyShaped,
  // bench
  NegativeRtt,
  EmptySamples,
  // opf
  Disconnected,
  NoGenerator,
  InfeasibleDemand,
  Infeasible,
  Unbounded,
  LocalInfeasible,
  MissingNeighborMessage,
  NotConverged,
  // cli
  ConfigInvalid,
  ExperimentFailed,
  IncompatibleRuns,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownSignal: return "UnknownSignal";
    case ErrorCode::DirectionMismatch: return "DirectionMismatch";
    case ErrorCode::DuplicateInputDriver: return "DuplicateInputDriver";
    case ErrorCode::UndrivenInput: return "UndrivenInput";
    case ErrorCode::SelfLink: return "SelfLink";
    case ErrorCode::NoCoordinator: return "NoCoordinator";
    case ErrorCode::MixedClockDomain: return "MixedClockDomain";
    case ErrorCode::AddressInUse: return "AddressInUse";
    case ErrorCode::ConnectionRefused: return "ConnectionRefused";
    case ErrorCode::HandshakeTimeout: return "HandshakeTimeout";
    case ErrorCode::SessionClosed: return "SessionClosed";
    case ErrorCode::BadPattern: return "BadPattern";
    case ErrorCode::PeerUnreachable: return "PeerUnreachable";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::TransportDown: return "TransportDown";
    case ErrorCode::TimeoutExpired: return "TimeoutExpired";
    case ErrorCode::DeadlockDetected: return "DeadlockDetected";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::AlreadyShaped: return "AlreadyShaped";
    case ErrorCode::NegativeRtt: return "NegativeRtt";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NoGenerator: return "NoGenerator";
    case ErrorCode::InfeasibleDemand: return "InfeasibleDemand";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::LocalInfeasible: return "LocalInfeasible";
    case ErrorCode::MissingNeighborMessage: return "MissingNeighborMessage";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ExperimentFailed: return "ExperimentFailed";
    case ErrorCode::IncompatibleRuns: return "IncompatibleRuns";
  }
  return "Unknown";
}

/// The single exception type thrown by the library. Callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace smb
