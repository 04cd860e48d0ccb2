#pragma once

#include <chrono>
#include <map>
#include <string>

namespace xfd {

/// Process-wide wall-clock accumulators per phase. Only leaf phases are
/// timed, so the totals never overlap.
class PhaseTimings {
public:
    static PhaseTimings& global();

    void add(const std::string& phase, double seconds);
    void reset();
    std::map<std::string, double> totals() const;

private:
    std::map<std::string, double> totals_;
};

class ScopedTimer {
public:
    explicit ScopedTimer(std::string phase) : phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}
    ~ScopedTimer() {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
        PhaseTimings::global().add(phase_, dt.count());
    }
    ScopedTimer(const ScopedTimer&) = delete;
    ScopedTimer& operator=(const ScopedTimer&) = delete;

private:
    std::string phase_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace xfd
