#pragma once

#include <algorithm>
#include <condition_variable>
#include <mutex>

namespace codesift::detail {

// Counting semaphore whose limit can change at runtime.
class Gate {
 public:
  explicit Gate(int limit) : limit_(std::max(1, limit)) {}

  void set_limit(int n) {
    std::lock_guard lock(mutex_);
    limit_ = std::max(1, n);
    cv_.notify_all();
  }
  int limit() {
    std::lock_guard lock(mutex_);
    return limit_;
  }
  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return in_use_ < limit_; });
    ++in_use_;
  }
  void release() {
    std::lock_guard lock(mutex_);
    --in_use_;
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int limit_;
  int in_use_ = 0;
};

class GateGuard {
 public:
  explicit GateGuard(Gate& g) : gate_(g) { gate_.acquire(); }
  ~GateGuard() { gate_.release(); }
  GateGuard(const GateGuard&) = delete;
  GateGuard& operator=(const GateGuard&) = delete;

 private:
  Gate& gate_;
};

}  // namespace codesift::detail
