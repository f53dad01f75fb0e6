#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "dtwin/backplane/session.hpp"
#include "dtwin/wire/payload.hpp"

namespace dtwin::backplane {

inline constexpr const char* kTraceHeader =
    "step,t_s,x_m,y_m,heading_rad,speed_mps,steering_rad,throttle,brake,detected_limit_kmh,cte_m";

struct TraceActuation {
    float steering = 0.0f;
    float throttle = 0.0f;
    float brake = 0.0f;
};

/// CSV trace sink. Floats are printed with 9 significant digits; an absent
/// detection leaves its field empty.
class TraceWriter {
public:
    /// Opens (truncates) `path`. Throws SinkError.
    explicit TraceWriter(const std::string& path, std::uint64_t dt_ns);
    /// Writes to a caller-owned stream.
    TraceWriter(std::ostream& out, std::uint64_t dt_ns);

    /// Appends one row. Steps must strictly increase; throws SinkError otherwise
    /// or when the stream fails.
    void record_trace(std::uint64_t step, const wire::VehicleTelemetry& telemetry, const TraceActuation& actuation,
                      std::optional<std::uint16_t> detection, double cte);

    /// Appends a trailing "# aborted ..." marker and flushes.
    void mark_aborted(std::uint64_t completed_steps, const std::string& reason);
    void flush();

    std::uint64_t rows() const noexcept { return rows_; }

private:
    void check();

    std::ofstream file_;
    std::ostream* out_;
    std::uint64_t dt_ns_;
    std::uint64_t rows_ = 0;
    std::optional<std::uint64_t> last_step_;
};

/// Session observer that snoops routed frames and writes one trace row per
/// step: the telemetry the vehicle published during the step, the commands
/// the vehicle applied during it (those delivered in its GRANT), the
/// detection reported during it, and cross-track error of the reported pose.
class TraceRecorder final : public SessionObserver {
public:
    using CrossTrackFn = std::function<double(double x, double y)>;

    TraceRecorder(TraceWriter& writer, wire::MacAddress vehicle_mac, CrossTrackFn cross_track);

    void on_step_frames(std::uint64_t step, std::span<const SentFrame> frames) override;
    void on_finished(const SessionReport& report) override;
    void on_aborted(std::uint64_t completed_steps, const Error& error) override;

private:
    TraceWriter& writer_;
    wire::MacAddress vehicle_mac_;
    CrossTrackFn cross_track_;
    wire::VehicleTelemetry last_telemetry_;
    TraceActuation held_;
    TraceActuation pending_;
};

}  // namespace dtwin::backplane
