#include "smb/netem/shaped_link.hpp"

#include "smb/error.hpp"

namespace smb::netem {

ShapedLink::ShapedLink(std::string link_id, Deliver deliver, std::size_t capacity,
                       OverflowPolicy policy)
    : id_(std::move(link_id)), deliver_(std::move(deliver)), capacity_(capacity), policy_(policy) {
  if (capacity_ == 0) throw Error(ErrorCode::InvalidArgument, "link capacity must be >= 1");
  worker_ = std::thread([this] { run(); });
}

ShapedLink::~ShapedLink() {
  close(false);
  if (worker_.joinable()) worker_.detach();
}

void ShapedLink::attach(const NetProfile& profile) {
  std::lock_guard lock(mutex_);
  if (sampler_) throw Error(ErrorCode::AlreadyShaped, "link '" + id_ + "' already has a profile");
  sampler_.emplace(profile, id_);
}

bool ShapedLink::shaped() const {
  std::lock_guard lock(mutex_);
  return sampler_.has_value();
}

void ShapedLink::on_failure(std::function<void()> callback) {
  std::lock_guard lock(mutex_);
  on_failure_ = std::move(callback);
}

bool ShapedLink::send(std::string payload, bool droppable) {
  std::function<void()> notify;
  {
    std::lock_guard lock(mutex_);
    if (closing_ || failed_) throw Error(ErrorCode::SessionClosed, "link '" + id_ + "' is closed");
    ++stats_.sent;
    auto now = Clock::now();
    auto due = now;
    if (sampler_) {
      if (droppable && sampler_->lost()) {
        ++stats_.lost;
        return false;
      }
      due = now + sampler_->sample();
    }
    if (due < last_due_) due = last_due_;
    last_due_ = due;

    if (queue_.size() >= capacity_) {
      if (policy_ == OverflowPolicy::drop_oldest) {
        queue_.pop_front();
        ++stats_.overflow_dropped;
      } else {
        failed_ = true;
        notify = std::move(on_failure_);
      }
    }
    if (!failed_) queue_.push_back({due, std::move(payload)});
  }
  if (notify) {
    cv_.notify_all();
    notify();
    throw Error(ErrorCode::SessionClosed, "link '" + id_ + "' overflowed and was disconnected");
  }
  cv_.notify_all();
  return true;
}

void ShapedLink::run() {
  std::unique_lock lock(mutex_);
  for (;;) {
    if (failed_) break;
    if (queue_.empty()) {
      drained_.notify_all();
      if (closing_) break;
      cv_.wait(lock);
      continue;
    }
    auto due = queue_.front().due;
    if (Clock::now() < due) {
      cv_.wait_until(lock, due);
      continue;
    }
    Item item = std::move(queue_.front());
    queue_.pop_front();
    in_flight_ = true;
    lock.unlock();
    bool ok = true;
    try {
      deliver_(std::move(item.payload));
    } catch (...) {
      ok = false;
    }
    lock.lock();
    in_flight_ = false;
    if (!ok) {
      lock.unlock();
      fail();
      lock.lock();
      break;
    }
    ++stats_.delivered;
  }
  drained_.notify_all();
}

void ShapedLink::fail() {
  std::function<void()> notify;
  {
    std::lock_guard lock(mutex_);
    if (failed_) return;
    failed_ = true;
    notify = std::move(on_failure_);
  }
  cv_.notify_all();
  if (notify) notify();
}

void ShapedLink::close(bool drain, Duration limit) {
  {
    std::unique_lock lock(mutex_);
    if (drain && !failed_) {
      drained_.wait_for(lock, limit, [this] { return (queue_.empty() && !in_flight_) || failed_; });
    }
    closing_ = true;
    if (!drain) queue_.clear();
  }
  cv_.notify_all();
  if (worker_.joinable() && worker_.get_id() != std::this_thread::get_id()) worker_.join();
}

LinkStats ShapedLink::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

std::size_t ShapedLink::queued() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

}  // namespace smb::netem
