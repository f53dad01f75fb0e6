#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dtwin::harness {

struct TraceRow {
    std::uint64_t step = 0;
    double t_s = 0.0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double speed = 0.0;
    double steering = 0.0;
    double throttle = 0.0;
    double brake = 0.0;
    std::optional<int> detected;
    double cte = 0.0;
};

struct Trace {
    std::vector<TraceRow> rows;
    /// Text of the "# aborted ..." marker, if the run was cut short.
    std::optional<std::string> aborted;
};

/// Throws MalformedTrace on a missing/unknown header, bad rows, or no rows.
Trace read_trace(const std::string& path);
Trace parse_trace(const std::string& text);

/// A new non-zero limit appearing in the detection column.
struct DetectionEvent {
    int limit_kmh = 0;
    std::uint64_t step = 0;
    double t_s = 0.0;
    double x = 0.0;
    double y = 0.0;
};

/// Stretch of the run governed by one speed target: before the first
/// detection, then from each detection to the next.
struct SpeedSegment {
    int limit_kmh = 0;  // 0 for the initial segment
    double target_mps = 0.0;
    std::uint64_t first_step = 0;
    std::uint64_t last_step = 0;
    /// From segment start until speed enters the band and stays there to the
    /// segment end; empty if it never does.
    std::optional<double> settling_time_s;
    /// Mean (speed - target) over the last 20% of the segment.
    double steady_state_error = 0.0;
    double max_speed = 0.0;
};

struct SummaryOptions {
    /// Target of the initial segment; defaults to its final speed.
    std::optional<double> initial_target_mps;
    double settle_band = 0.02;
};

struct TraceSummary {
    std::uint64_t rows = 0;
    double duration_s = 0.0;
    std::vector<DetectionEvent> detections;
    std::vector<SpeedSegment> segments;
    double max_abs_cte = 0.0;
    std::optional<std::string> aborted;

    nlohmann::json to_json() const;
};

TraceSummary summarize_trace(const Trace& trace, const SummaryOptions& options = {});

/// Writes speed_vs_time.{csv,svg}, cte_vs_time.{csv,svg} and summary.json
/// into `dir` (created if needed). Returns the written paths.
std::vector<std::string> write_summary_files(const Trace& trace, const TraceSummary& summary, const std::string& dir);

}  // namespace dtwin::harness
