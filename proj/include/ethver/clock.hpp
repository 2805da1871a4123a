#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <thread>

namespace ethver {

/// Milliseconds since an arbitrary epoch. All rate-limit accounting runs on
/// this scale; one day is 86'400'000.
using TimeMs = std::int64_t;

constexpr TimeMs kMsPerSecond = 1000;
constexpr TimeMs kMsPerDay = 86'400'000;

/// Time source the gateway components are parameterized over. Tests inject a
/// SimClock so nothing ever sleeps on the wall clock.
class Clock {
public:
    virtual ~Clock() = default;
    virtual TimeMs now() = 0;
    virtual void sleep_until(TimeMs t) = 0;
};

class SystemClock final : public Clock {
public:
    TimeMs now() override {
        using namespace std::chrono;
        return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
    }
    void sleep_until(TimeMs t) override {
        const TimeMs delta = t - now();
        if (delta > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delta));
    }
};

/// Manual clock: sleep_until simply advances time. Thread-safe so concurrent
/// workers can share one instance.
class SimClock final : public Clock {
public:
    explicit SimClock(TimeMs start = 0) : now_(start) {}

    TimeMs now() override {
        std::lock_guard lock(mu_);
        return now_;
    }
    void sleep_until(TimeMs t) override {
        std::lock_guard lock(mu_);
        now_ = std::max(now_, t);
    }
    void advance(TimeMs delta) {
        std::lock_guard lock(mu_);
        now_ += delta;
    }
    void set(TimeMs t) {
        std::lock_guard lock(mu_);
        now_ = t;
    }

private:
    std::mutex mu_;
    TimeMs now_;
};

} // namespace ethver
