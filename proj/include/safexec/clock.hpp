#pragma once

#include <chrono>
#include <cstdint>
#include <thread>

namespace safexec {

// Time source injected into the executor and tool layer so tests can run
// against a manual clock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual int64_t now_ms() = 0;
  virtual void sleep_ms(int64_t ms) = 0;
};

class SteadyClock : public Clock {
 public:
  int64_t now_ms() override {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
  void sleep_ms(int64_t ms) override {
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  }
  static SteadyClock& instance() {
    static SteadyClock clock;
    return clock;
  }
};

// Deterministic clock: sleeping advances virtual time, nothing else does
// unless a test advances it explicitly.
class ManualClock : public Clock {
 public:
  explicit ManualClock(int64_t start_ms = 0) : now_(start_ms) {}
  int64_t now_ms() override { return now_; }
  void sleep_ms(int64_t ms) override { now_ += ms; }
  void advance(int64_t ms) { now_ += ms; }

 private:
  int64_t now_;
};

}  // namespace safexec
