#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>

#include "smb/core/signal.hpp"

namespace smb {

/// Observer for records leaving an endpoint. `to` is the input signal the
/// record is addressed to under the active wiring.
using SendTrace = std::function<void(const std::string& from, const std::string& to,
                                     const SignalRecord& rec)>;

/// Transport-neutral view of one co-simulation participant: it writes its
/// output signals and reads records arriving on its input signals. Records
/// returned by receive() carry the *input* signal name.
class Endpoint {
 public:
  virtual ~Endpoint() = default;

  /// rec.signal must be one of this endpoint's outputs.
  virtual void send(const SignalRecord& rec) = 0;

  /// Next record on any input, waiting at most `timeout`.
  virtual std::optional<SignalRecord> receive(Duration timeout) = 0;

  virtual void close() = 0;

  void set_send_trace(SendTrace trace) { trace_ = std::move(trace); }

 protected:
  void trace_send(const std::string& from, const std::string& to, const SignalRecord& rec) const {
    if (trace_) trace_(from, to, rec);
  }

 private:
  SendTrace trace_;
};

}  // namespace smb
