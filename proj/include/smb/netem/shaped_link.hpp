#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "smb/netem/profile.hpp"

namespace smb::netem {

enum class OverflowPolicy { drop_oldest, disconnect };

struct LinkStats {
  std::size_t sent = 0;
  std::size_t delivered = 0;
  std::size_t lost = 0;
  std::size_t overflow_dropped = 0;
};

/// One direction of a transport connection. Payloads handed to send() are
/// passed to the delivery callback on the link's own thread after a sampled
/// delay. A payload never overtakes an earlier one: its due time is
/// max(now + sample, due time of the previous payload).
class ShapedLink {
 public:
  using Clock = std::chrono::steady_clock;
  using Deliver = std::function<void(std::string&&)>;

  ShapedLink(std::string link_id, Deliver deliver,
             std::size_t capacity = std::numeric_limits<std::size_t>::max(),
             OverflowPolicy policy = OverflowPolicy::drop_oldest);
  ~ShapedLink();

  ShapedLink(const ShapedLink&) = delete;
  ShapedLink& operator=(const ShapedLink&) = delete;

  /// Installs the delay model. Throws AlreadyShaped on a second call.
  void attach(const NetProfile& profile);
  [[nodiscard]] bool shaped() const;

  /// Queues a payload. Returns false when the loss model dropped it (only
  /// for droppable payloads). Throws SessionClosed once the link is closed
  /// or was disconnected by overflow.
  bool send(std::string payload, bool droppable = true);

  /// Invoked once if the delivery callback throws or the overflow policy
  /// disconnects the link.
  void on_failure(std::function<void()> callback);

  /// Stops the worker. With drain=true, waits (up to `limit`) until queued
  /// payloads have been delivered on schedule.
  void close(bool drain = false, Duration limit = std::chrono::seconds(5));

  [[nodiscard]] LinkStats stats() const;
  [[nodiscard]] std::size_t queued() const;
  [[nodiscard]] const std::string& id() const { return id_; }

 private:
  struct Item {
    Clock::time_point due;
    std::string payload;
  };

  void run();
  void fail();

  std::string id_;
  Deliver deliver_;
  std::size_t capacity_;
  OverflowPolicy policy_;

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::condition_variable drained_;
  std::deque<Item> queue_;
  std::optional<DelaySampler> sampler_;
  Clock::time_point last_due_{};
  bool closing_ = false;
  bool failed_ = false;
  bool in_flight_ = false;
  LinkStats stats_;
  std::function<void()> on_failure_;
  std::thread worker_;
};

}  // namespace smb::netem
