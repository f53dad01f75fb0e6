#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dtwin/wire/camera_frame.hpp"
#include "dtwin/wire/payload.hpp"

namespace dtwin::wire {

inline constexpr std::size_t kFragmentData = 1400;

/// Splits an image into CameraFragment payloads of at most 1400 data bytes.
/// Throws MalformedFrame for an empty or inconsistent image, or one needing
/// more than 65535 fragments.
std::vector<CameraFragment> fragment_payload(const CameraFrame& image, std::uint16_t frame_seq);

/// Exact inverse of fragment_payload. Fragments may arrive in any order but must
/// form one complete, consistent set; otherwise throws MalformedPayload.
CameraFrame reassemble(std::span<const CameraFragment> fragments);

}  // namespace dtwin::wire
