#pragma once

#include <deque>
#include <mutex>
#include <string>
#include <vector>

#include "ethver/clock.hpp"
#include "ethver/errors.hpp"

namespace ethver {

struct ApiKeyConfig {
    std::string key_id;
    int per_second_budget = 5;       // explorer allows five requests per second per key
    long daily_budget = 100'000;     // and 100,000 requests per key per day
    long used_today = 0;             // pre-spent quota, mostly for tests
};

struct RequestSlot {
    std::string key_id;
    std::size_t key_index = 0;
    TimeMs admitted_at = 0;
};

/// Shared request-budget accounting with round-robin key rotation.
///
/// The current key is sticky: it serves requests until either its 1-second
/// window or its daily budget is exhausted, then the rotor moves to the next
/// key. When every key is window-full the caller sleeps (via the injected
/// clock) until the earliest window reopens. When every key has spent its
/// daily budget, acquire throws AllKeysExhausted.
///
/// With an empty key list the explorer still answers, but only one request
/// every five seconds; the rotor enforces that spacing and hands out an
/// empty key id.
class KeyRotator {
public:
    KeyRotator(Clock& clock, std::vector<ApiKeyConfig> keys)
        : clock_(clock) {
        for (auto& cfg : keys) states_.push_back(KeyState{std::move(cfg), {}, -1});
    }

    std::size_t key_count() const { return states_.size(); }

    RequestSlot acquire_request_slot() {
        std::unique_lock lock(mu_);
        if (states_.empty()) return acquire_keyless(lock);

        for (;;) {
            const TimeMs now = clock_.now();
            const long day = static_cast<long>(now / kMsPerDay);

            bool any_daily_left = false;
            TimeMs earliest_reopen = -1;
            for (std::size_t i = 0; i < states_.size(); ++i) {
                KeyState& ks = states_[(current_ + i) % states_.size()];
                ks.roll_day(day);
                if (ks.config.used_today >= ks.config.daily_budget) continue;
                any_daily_left = true;
                ks.prune_window(now);
                if (static_cast<int>(ks.window.size()) < ks.config.per_second_budget) {
                    current_ = (current_ + i) % states_.size();
                    ks.window.push_back(now);
                    ks.config.used_today++;
                    return RequestSlot{ks.config.key_id, current_, now};
                }
                const TimeMs reopen = ks.window.front() + kMsPerSecond;
                if (earliest_reopen < 0 || reopen < earliest_reopen) earliest_reopen = reopen;
            }

            if (!any_daily_left) throw AllKeysExhausted();

            lock.unlock();
            clock_.sleep_until(earliest_reopen);
            lock.lock();
        }
    }

    /// Remaining daily quota of one key (tests and diagnostics).
    long daily_remaining(std::size_t index) {
        std::lock_guard lock(mu_);
        const KeyState& ks = states_.at(index);
        return ks.config.daily_budget - ks.config.used_today;
    }

private:
    struct KeyState {
        ApiKeyConfig config;
        std::deque<TimeMs> window; // admit times within the last second
        long day = -1;

        void roll_day(long today) {
            if (day != today) {
                // pre-spent quota from the config applies to the first day only
                if (day != -1) config.used_today = 0;
                day = today;
            }
        }
        void prune_window(TimeMs now) {
            while (!window.empty() && window.front() <= now - kMsPerSecond) window.pop_front();
        }
    };

    RequestSlot acquire_keyless(std::unique_lock<std::mutex>& lock) {
        constexpr TimeMs spacing = 5 * kMsPerSecond; // keyless requests: one per five seconds
        for (;;) {
            const TimeMs now = clock_.now();
            if (last_keyless_ < 0 || now - last_keyless_ >= spacing) {
                last_keyless_ = now;
                return RequestSlot{"", 0, now};
            }
            const TimeMs wake = last_keyless_ + spacing;
            lock.unlock();
            clock_.sleep_until(wake);
            lock.lock();
        }
    }

    Clock& clock_;
    std::mutex mu_;
    std::vector<KeyState> states_;
    std::size_t current_ = 0;
    TimeMs last_keyless_ = -1;
};

/// Key file format: one key per line, blank lines and '#' comments ignored.
inline std::vector<ApiKeyConfig> parse_key_lines(const std::string& text,
                                                 int per_second_budget = 5,
                                                 long daily_budget = 100'000) {
    std::vector<ApiKeyConfig> keys;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t");
        line = line.substr(first, last - first + 1);
        if (line[0] == '#') continue;
        keys.push_back(ApiKeyConfig{line, per_second_budget, daily_budget, 0});
    }
    return keys;
}

} // namespace ethver
