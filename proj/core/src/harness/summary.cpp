#include "dtwin/harness/summary.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "dtwin/backplane/trace.hpp"
#include "dtwin/error.hpp"

namespace dtwin::harness {

namespace {

[[noreturn]] void malformed(std::size_t line, std::string_view what) {
    throw Error(ErrorKind::MalformedTrace, fmt::format("line {}: {}", line, what));
}

template <class T>
T field(std::string_view text, std::size_t line, std::string_view name) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        malformed(line, fmt::format("bad {} '{}'", name, text));
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

struct Series {
    std::string title;
    std::string y_label;
    std::vector<std::pair<double, double>> points;
    std::vector<std::pair<double, double>> reference;
};

std::string svg_plot(const Series& s) {
    constexpr double W = 800, H = 400, L = 60, R = 20, T = 30, B = 40;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (!s.points.empty()) {
        x0 = s.points.front().first;
        x1 = s.points.back().first;
        const auto [lo, hi] = std::minmax_element(s.points.begin(), s.points.end(),
                                                  [](auto& a, auto& b) { return a.second < b.second; });
        y0 = lo->second;
        y1 = hi->second;
        for (const auto& p : s.reference) {
            y0 = std::min(y0, p.second);
            y1 = std::max(y1, p.second);
        }
    }
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 - y0 < 1e-9) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    const auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* style) {
        std::string out = fmt::format(R"(<polyline fill="none" {} points=")", style);
        const std::size_t stride = std::max<std::size_t>(1, pts.size() / 2000);
        for (std::size_t i = 0; i < pts.size(); i += stride) {
            out += fmt::format("{:.2f},{:.2f} ", px(pts[i].first), py(pts[i].second));
        }
        if (!pts.empty()) out += fmt::format("{:.2f},{:.2f}", px(pts.back().first), py(pts.back().second));
        return out + "\"/>\n";
    };

    std::string svg = fmt::format(
        R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)"
        "\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        W, H);
    svg += fmt::format(R"(<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>)"
                       "\n",
                       W / 2, s.title);
    svg += fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>)"
                       "\n",
                       L, T, W - L - R, H - T - B);
    for (int i = 0; i <= 4; ++i) {
        const double yv = y0 + (y1 - y0) * i / 4.0;
        const double xv = x0 + (x1 - x0) * i / 4.0;
        svg += fmt::format(R"(<text x="{}" y="{:.1f}" text-anchor="end">{:.3g}</text>)"
                           "\n",
                           L - 5, py(yv) + 4, yv);
        svg += fmt::format(R"(<text x="{:.1f}" y="{}" text-anchor="middle">{:.4g}</text>)"
                           "\n",
                           px(xv), H - B + 16, xv);
    }
    svg += fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">t [s]</text>)"
                       "\n",
                       W / 2, H - 6);
    svg += fmt::format(R"s(<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">{}</text>)s"
                       "\n",
                       H / 2, H / 2, s.y_label);
    if (!s.reference.empty()) svg += polyline(s.reference, R"(stroke="#c33" stroke-dasharray="6 4")");
    svg += polyline(s.points, R"(stroke="#136" stroke-width="1.5")");
    return svg + "</svg>\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorKind::SinkError, fmt::format("cannot write {}", path.string()));
}

}  // namespace

Trace parse_trace(const std::string& text) {
    Trace trace;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (line.rfind("# aborted", 0) == 0) trace.aborted = line.substr(2);
            continue;
        }
        if (!header) {
            if (line != backplane::kTraceHeader) malformed(n, "unexpected header");
            header = true;
            continue;
        }
        const auto f = split(line);
        if (f.size() != 11) malformed(n, fmt::format("expected 11 fields, got {}", f.size()));
        TraceRow r;
        r.step = field<std::uint64_t>(f[0], n, "step");
        r.t_s = field<double>(f[1], n, "t_s");
        r.x = field<double>(f[2], n, "x_m");
        r.y = field<double>(f[3], n, "y_m");
        r.heading = field<double>(f[4], n, "heading_rad");
        r.speed = field<double>(f[5], n, "speed_mps");
        r.steering = field<double>(f[6], n, "steering_rad");
        r.throttle = field<double>(f[7], n, "throttle");
        r.brake = field<double>(f[8], n, "brake");
        if (!f[9].empty()) r.detected = field<int>(f[9], n, "detected_limit_kmh");
        r.cte = field<double>(f[10], n, "cte_m");
        if (!trace.rows.empty() && r.step <= trace.rows.back().step) malformed(n, "steps not increasing");
        trace.rows.push_back(r);
    }
    if (!header) throw Error(ErrorKind::MalformedTrace, "empty trace: no header");
    if (trace.rows.empty()) throw Error(ErrorKind::MalformedTrace, "empty trace: no rows");
    return trace;
}

Trace read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MalformedTrace, fmt::format("cannot read trace '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trace(ss.str());
}

TraceSummary summarize_trace(const Trace& trace, const SummaryOptions& options) {
    if (trace.rows.empty()) throw Error(ErrorKind::MalformedTrace, "empty trace: no rows");
    const auto& rows = trace.rows;
    TraceSummary s;
    s.rows = rows.size();
    s.duration_s = rows.back().t_s - rows.front().t_s;
    s.aborted = trace.aborted;

    int current = 0;
    std::vector<std::size_t> boundaries{0};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        s.max_abs_cte = std::max(s.max_abs_cte, std::abs(rows[i].cte));
        const int d = rows[i].detected.value_or(0);
        if (d != 0 && d != current) {
            current = d;
            s.detections.push_back({d, rows[i].step, rows[i].t_s, rows[i].x, rows[i].y});
            if (i != 0) boundaries.push_back(i);
        }
    }
    boundaries.push_back(rows.size());
    const bool first_is_detection = !s.detections.empty() && s.detections.front().step == rows.front().step;

    for (std::size_t b = 0; b + 1 < boundaries.size(); ++b) {
        const std::size_t lo = boundaries[b];
        const std::size_t hi = boundaries[b + 1];
        if (hi <= lo) continue;
        SpeedSegment seg;
        seg.first_step = rows[lo].step;
        seg.last_step = rows[hi - 1].step;
        const std::size_t det_index = first_is_detection ? b : b - 1;
        if (b == 0 && !first_is_detection) {
            seg.target_mps = options.initial_target_mps.value_or(rows[hi - 1].speed);
        } else {
            seg.limit_kmh = s.detections[det_index].limit_kmh;
            seg.target_mps = seg.limit_kmh / 3.6;
        }

        const double band = options.settle_band * std::abs(seg.target_mps) + 1e-9;
        std::optional<std::size_t> settled;
        for (std::size_t i = hi; i-- > lo;) {
            if (std::abs(rows[i].speed - seg.target_mps) > band) break;
            settled = i;
        }
        if (settled) seg.settling_time_s = rows[*settled].t_s - rows[lo].t_s;

        const std::size_t tail = lo + (hi - lo) * 4 / 5;
        double sum = 0.0;
        for (std::size_t i = tail; i < hi; ++i) sum += rows[i].speed - seg.target_mps;
        seg.steady_state_error = sum / static_cast<double>(hi - tail);
        for (std::size_t i = lo; i < hi; ++i) seg.max_speed = std::max(seg.max_speed, rows[i].speed);
        s.segments.push_back(seg);
    }
    return s;
}

nlohmann::json TraceSummary::to_json() const {
    nlohmann::json j;
    j["rows"] = rows;
    j["duration_s"] = duration_s;
    j["max_abs_cte_m"] = max_abs_cte;
    j["aborted"] = aborted ? nlohmann::json(*aborted) : nlohmann::json(nullptr);
    j["detections"] = nlohmann::json::array();
    for (const auto& d : detections) {
        j["detections"].push_back({{"limit_kmh", d.limit_kmh}, {"step", d.step}, {"t_s", d.t_s}, {"x_m", d.x},
                                   {"y_m", d.y}});
    }
    j["segments"] = nlohmann::json::array();
    for (const auto& g : segments) {
        j["segments"].push_back({{"limit_kmh", g.limit_kmh},
                                 {"target_mps", g.target_mps},
                                 {"first_step", g.first_step},
                                 {"last_step", g.last_step},
                                 {"settling_time_s", g.settling_time_s ? nlohmann::json(*g.settling_time_s)
                                                                       : nlohmann::json(nullptr)},
                                 {"steady_state_error_mps", g.steady_state_error},
                                 {"max_speed_mps", g.max_speed}});
    }
    return j;
}

std::vector<std::string> write_summary_files(const Trace& trace, const TraceSummary& summary,
                                             const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw Error(ErrorKind::SinkError, fmt::format("cannot create {}: {}", dir, ec.message()));

    Series speed{"speed vs time", "speed [m/s]", {}, {}};
    Series cte{"cross-track error vs time", "cte [m]", {}, {}};
    std::string speed_csv = "t_s,speed_mps,target_mps\n";
    std::string cte_csv = "t_s,cte_m\n";
    std::size_t seg = 0;
    for (const auto& r : trace.rows) {
        while (seg + 1 < summary.segments.size() && r.step > summary.segments[seg].last_step) ++seg;
        const double target = summary.segments.empty() ? 0.0 : summary.segments[seg].target_mps;
        speed.points.emplace_back(r.t_s, r.speed);
        speed.reference.emplace_back(r.t_s, target);
        cte.points.emplace_back(r.t_s, r.cte);
        speed_csv += fmt::format("{:.9g},{:.9g},{:.9g}\n", r.t_s, r.speed, target);
        cte_csv += fmt::format("{:.9g},{:.9g}\n", r.t_s, r.cte);
    }

    std::vector<std::string> written;
    const auto put = [&](const char* name, const std::string& text) {
        write_text(root / name, text);
        written.push_back((root / name).string());
    };
    put("speed_vs_time.csv", speed_csv);
    put("speed_vs_time.svg", svg_plot(speed));
    put("cte_vs_time.csv", cte_csv);
    put("cte_vs_time.svg", svg_plot(cte));
    put("summary.json", summary.to_json().dump(2) + "\n");
    return written;
}

}  // namespace dtwin::harness
