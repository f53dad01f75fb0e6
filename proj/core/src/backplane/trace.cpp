#include "dtwin/backplane/trace.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dtwin/error.hpp"

namespace dtwin::backplane {

TraceWriter::TraceWriter(const std::string& path, std::uint64_t dt_ns)
    : file_(path, std::ios::out | std::ios::trunc | std::ios::binary), out_(&file_), dt_ns_(dt_ns) {
    if (!file_) throw Error(ErrorKind::SinkError, fmt::format("cannot open trace '{}'", path));
    *out_ << kTraceHeader << '\n';
    check();
}

TraceWriter::TraceWriter(std::ostream& out, std::uint64_t dt_ns) : out_(&out), dt_ns_(dt_ns) {
    *out_ << kTraceHeader << '\n';
    check();
}

void TraceWriter::record_trace(std::uint64_t step, const wire::VehicleTelemetry& t, const TraceActuation& a,
                               std::optional<std::uint16_t> detection, double cte) {
    if (last_step_ && step <= *last_step_) {
        throw Error(ErrorKind::SinkError, fmt::format("trace step {} after step {}", step, *last_step_));
    }
    const double t_s = static_cast<double>(step * dt_ns_) * 1e-9;
    const std::string det = detection ? fmt::format("{}", *detection) : std::string();
    fmt::print(*out_, "{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{},{:.9g}\n", step, t_s,
               static_cast<double>(t.x), static_cast<double>(t.y), static_cast<double>(t.heading),
               static_cast<double>(t.speed), static_cast<double>(a.steering), static_cast<double>(a.throttle),
               static_cast<double>(a.brake), det, cte);
    check();
    last_step_ = step;
    ++rows_;
}

void TraceWriter::mark_aborted(std::uint64_t completed_steps, const std::string& reason) {
    std::string oneline = reason;
    for (char& c : oneline) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    fmt::print(*out_, "# aborted after {} steps: {}\n", completed_steps, oneline);
    flush();
}

void TraceWriter::flush() {
    out_->flush();
    check();
}

void TraceWriter::check() {
    if (!*out_) throw Error(ErrorKind::SinkError, "trace stream write failed");
}

TraceRecorder::TraceRecorder(TraceWriter& writer, wire::MacAddress vehicle_mac, CrossTrackFn cross_track)
    : writer_(writer), vehicle_mac_(vehicle_mac), cross_track_(std::move(cross_track)) {}

void TraceRecorder::on_step_frames(std::uint64_t step, std::span<const SentFrame> frames) {
    // Commands sent during step-1 reached the vehicle in GRANT(step).
    held_ = pending_;
    std::optional<std::uint16_t> detection;

    for (const auto& sf : frames) {
        const auto& f = sf.frame;
        if (f.ethertype != wire::kEtherTypeDigitalTwin || f.payload.empty()) continue;
        const auto schema = static_cast<wire::SchemaId>(f.payload[0]);
        if (schema == wire::SchemaId::CameraFragment) continue;
        wire::Payload p;
        try {
            p = wire::decode_payload(f.payload);
        } catch (const Error&) {
            continue;
        }
        const bool to_vehicle = f.dst == vehicle_mac_ || f.dst.is_multicast();
        if (auto* t = std::get_if<wire::VehicleTelemetry>(&p); t && f.src == vehicle_mac_) {
            last_telemetry_ = *t;
        } else if (auto* s = std::get_if<wire::SteeringCommand>(&p); s && to_vehicle) {
            pending_.steering = s->steering;
        } else if (auto* c = std::get_if<wire::SpeedCommand>(&p); c && to_vehicle) {
            pending_.throttle = c->throttle;
            pending_.brake = c->brake;
        } else if (auto* d = std::get_if<wire::DetectionReport>(&p); d && d->limit_kmh != 0) {
            detection = d->limit_kmh;
        }
    }

    const double cte = cross_track_ ? cross_track_(last_telemetry_.x, last_telemetry_.y) : 0.0;
    writer_.record_trace(step, last_telemetry_, held_, detection, cte);
}

void TraceRecorder::on_finished(const SessionReport&) { writer_.flush(); }

void TraceRecorder::on_aborted(std::uint64_t completed_steps, const Error& error) {
    try {
        writer_.mark_aborted(completed_steps, error.what());
    } catch (const Error&) {
        // The session error is the one worth reporting.
    }
}

}  // namespace dtwin::backplane
