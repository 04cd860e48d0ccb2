#include "xfd/profile.hpp"

#include <mutex>

namespace xfd {

namespace {
std::mutex& timings_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

PhaseTimings& PhaseTimings::global() {
    static PhaseTimings t;
    return t;
}

void PhaseTimings::add(const std::string& phase, double seconds) {
    std::lock_guard lock(timings_mutex());
    totals_[phase] += seconds;
}

void PhaseTimings::reset() {
    std::lock_guard lock(timings_mutex());
    totals_.clear();
}

std::map<std::string, double> PhaseTimings::totals() const {
    std::lock_guard lock(timings_mutex());
    return totals_;
}

} // namespace xfd
