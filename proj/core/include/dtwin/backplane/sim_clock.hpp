#pragma once

#include <cstdint>

#include "dtwin/error.hpp"

namespace dtwin::backplane {

/// Integer-nanosecond simulation clock; sim_time is always step_index * dt.
class SimClock {
public:
    explicit SimClock(std::uint64_t dt_ns) : dt_ns_(dt_ns) {
        if (dt_ns == 0) throw Error(ErrorKind::ValidationError, "dt must be positive");
    }

    std::uint64_t step_index() const noexcept { return step_; }
    std::uint64_t dt_ns() const noexcept { return dt_ns_; }
    std::uint64_t sim_time_ns() const noexcept { return step_ * dt_ns_; }
    static std::uint64_t time_at(std::uint64_t step, std::uint64_t dt_ns) noexcept { return step * dt_ns; }
    double dt_seconds() const noexcept { return static_cast<double>(dt_ns_) * 1e-9; }

    void advance() noexcept { ++step_; }

private:
    std::uint64_t dt_ns_;
    std::uint64_t step_ = 0;
};

}  // namespace dtwin::backplane
