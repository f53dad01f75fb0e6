#pragma once

#include <cstdint>

#include "dtwin/wire/camera_frame.hpp"

namespace dtwin::environment {

// Synthetic speed-limit sign: a red ring around a white disc. Across the
// middle half of the disc sit 8 vertical stripes, black = 1 and white = 0,
// spelling the limit in km/h as an 8-bit value, most significant bit on the
// left. Pixels are point-sampled at their centres (u + 0.5, v + 0.5).
namespace glyph {

inline constexpr int kStripes = 8;
/// Interior (white) radius as a fraction of the outer radius.
inline constexpr double kInnerRatio = 0.75;
/// Stripes span [-r/2, r/2) horizontally and (-r/2, r/2) vertically around the centre.
inline constexpr double kStripeHalfSpan = 0.5;

struct Rgb {
    std::uint8_t r, g, b;
};
inline constexpr Rgb kRed{200, 20, 30};
inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};

/// Red-pixel test shared by the renderer's contract and the detector.
constexpr bool is_red(std::uint8_t r, std::uint8_t g, std::uint8_t b) { return r > 128 && g < 64 && b < 64; }

}  // namespace glyph

/// Draws the glyph centred at continuous pixel coordinates (cx, cy) with outer
/// radius `radius` px, clipped to the image.
void draw_sign_glyph(wire::CameraFrame& frame, double cx, double cy, int radius, std::uint8_t value);

}  // namespace dtwin::environment
