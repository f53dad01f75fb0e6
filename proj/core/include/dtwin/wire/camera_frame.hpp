#pragma once

#include <cstdint>
#include <vector>

namespace dtwin::wire {

/// Row-major RGB image; pixels.size() == width * height * 3.
struct CameraFrame {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<std::uint8_t> pixels;

    std::size_t byte_size() const { return static_cast<std::size_t>(width) * height * 3; }
    bool well_formed() const { return pixels.size() == byte_size(); }

    friend bool operator==(const CameraFrame&, const CameraFrame&) = default;
};

}  // namespace dtwin::wire
