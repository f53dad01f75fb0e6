#pragma once

#include <cstdint>

#include "dtwin/wire/camera_frame.hpp"

namespace dtwin::perception {

struct Detection {
    std::uint16_t limit_kmh = 0;  // 0 = none
    double cx = 0.0;              // disc centre, px
    double cy = 0.0;
    double radius = 0.0;          // px
};

inline constexpr std::size_t kMinRedComponent = 20;

/// Decodes a stripe-coded speed-limit glyph: largest 4-connected red
/// component (>= 20 px) -> bounding circle -> 8 stripe samples across the
/// middle half -> 8-bit value. Values outside {30, 40, ..., 80} yield none.
/// Throws MalformedFrame when the pixel buffer does not match the size.
Detection detect_sign(const wire::CameraFrame& frame);

}  // namespace dtwin::perception
