#include "dtwin/perception/sign_detector.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "dtwin/environment/sign_glyph.hpp"
#include "dtwin/environment/track.hpp"
#include "dtwin/error.hpp"

namespace dtwin::perception {

namespace glyph = environment::glyph;

namespace {

struct Component {
    std::size_t size = 0;
    int min_u = 0, max_u = 0, min_v = 0, max_v = 0;
};

}  // namespace

Detection detect_sign(const wire::CameraFrame& frame) {
    if (!frame.well_formed()) {
        throw Error(ErrorKind::MalformedFrame, fmt::format("{}x{} frame carries {} bytes", frame.width, frame.height,
                                                           frame.pixels.size()));
    }
    const int w = frame.width;
    const int h = frame.height;
    const auto at = [&](int u, int v) { return (static_cast<std::size_t>(v) * w + static_cast<std::size_t>(u)) * 3; };

    std::vector<std::uint8_t> red(static_cast<std::size_t>(w) * h, 0);
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const std::size_t i = at(u, v);
            red[static_cast<std::size_t>(v) * w + u] =
                glyph::is_red(frame.pixels[i], frame.pixels[i + 1], frame.pixels[i + 2]) ? 1 : 0;
        }
    }

    // Largest 4-connected component by flood fill; ties keep the first found
    // in raster order.
    Component best;
    std::vector<int> stack;
    for (int start = 0; start < w * h; ++start) {
        if (red[static_cast<std::size_t>(start)] != 1) continue;
        Component c{0, w, -1, h, -1};
        stack.assign(1, start);
        red[static_cast<std::size_t>(start)] = 2;
        while (!stack.empty()) {
            const int idx = stack.back();
            stack.pop_back();
            const int u = idx % w;
            const int v = idx / w;
            ++c.size;
            c.min_u = std::min(c.min_u, u);
            c.max_u = std::max(c.max_u, u);
            c.min_v = std::min(c.min_v, v);
            c.max_v = std::max(c.max_v, v);
            const int nbrs[4][2] = {{u - 1, v}, {u + 1, v}, {u, v - 1}, {u, v + 1}};
            for (const auto& n : nbrs) {
                if (n[0] < 0 || n[0] >= w || n[1] < 0 || n[1] >= h) continue;
                auto& cell = red[static_cast<std::size_t>(n[1]) * w + n[0]];
                if (cell == 1) {
                    cell = 2;
                    stack.push_back(n[1] * w + n[0]);
                }
            }
        }
        if (c.size > best.size) best = c;
    }
    if (best.size < kMinRedComponent) return {};

    Detection d;
    d.cx = (best.min_u + best.max_u + 1) / 2.0;
    d.cy = (best.min_v + best.max_v + 1) / 2.0;
    d.radius = (best.max_u - best.min_u + 1) / 2.0;

    const double half = glyph::kStripeHalfSpan * d.radius;
    const double stripe_w = 2.0 * half / glyph::kStripes;
    const int row = static_cast<int>(std::floor(d.cy));
    if (row < 0 || row >= h) return {};
    unsigned value = 0;
    for (int i = 0; i < glyph::kStripes; ++i) {
        const int u = static_cast<int>(std::floor(d.cx - half + (i + 0.5) * stripe_w));
        if (u < 0 || u >= w) return {};
        const std::size_t p = at(u, row);
        const int gray = (frame.pixels[p] + frame.pixels[p + 1] + frame.pixels[p + 2]) / 3;
        value = (value << 1) | (gray < 128 ? 1u : 0u);
    }
    if (!environment::is_supported_limit(static_cast<int>(value))) return {};
    d.limit_kmh = static_cast<std::uint16_t>(value);
    return d;
}

}  // namespace dtwin::perception
