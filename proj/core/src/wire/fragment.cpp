#include "dtwin/wire/fragment.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "dtwin/error.hpp"

namespace dtwin::wire {

std::vector<CameraFragment> fragment_payload(const CameraFrame& image, std::uint16_t frame_seq) {
    const std::size_t total = image.byte_size();
    if (total == 0 || !image.well_formed()) {
        throw Error(ErrorKind::MalformedFrame,
                    fmt::format("{}x{} image carries {} bytes", image.width, image.height, image.pixels.size()));
    }
    const std::size_t count = (total + kFragmentData - 1) / kFragmentData;
    if (count > 0xFFFF) {
        throw Error(ErrorKind::MalformedFrame, fmt::format("image needs {} fragments", count));
    }

    std::vector<CameraFragment> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t begin = i * kFragmentData;
        const std::size_t end = std::min(total, begin + kFragmentData);
        CameraFragment f;
        f.frame_seq = frame_seq;
        f.fragment_index = static_cast<std::uint16_t>(i);
        f.fragment_count = static_cast<std::uint16_t>(count);
        f.width = image.width;
        f.height = image.height;
        f.data.assign(image.pixels.begin() + static_cast<std::ptrdiff_t>(begin),
                      image.pixels.begin() + static_cast<std::ptrdiff_t>(end));
        out.push_back(std::move(f));
    }
    return out;
}

CameraFrame reassemble(std::span<const CameraFragment> fragments) {
    if (fragments.empty()) throw Error(ErrorKind::MalformedPayload, "no fragments");
    const CameraFragment& head = fragments.front();
    const std::size_t count = head.fragment_count;
    if (count != fragments.size()) {
        throw Error(ErrorKind::MalformedPayload,
                    fmt::format("have {} of {} fragments", fragments.size(), count));
    }

    std::vector<const CameraFragment*> ordered(count, nullptr);
    for (const auto& f : fragments) {
        if (f.frame_seq != head.frame_seq || f.fragment_count != head.fragment_count || f.width != head.width ||
            f.height != head.height || f.fragment_index >= count || ordered[f.fragment_index] != nullptr) {
            throw Error(ErrorKind::MalformedPayload, "inconsistent fragment set");
        }
        ordered[f.fragment_index] = &f;
    }

    CameraFrame image{head.width, head.height, {}};
    const std::size_t total = image.byte_size();
    image.pixels.reserve(total);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t expected = std::min(kFragmentData, total - std::min(total, i * kFragmentData));
        if (ordered[i]->data.size() != expected) {
            throw Error(ErrorKind::MalformedPayload,
                        fmt::format("fragment {} has {} bytes, expected {}", i, ordered[i]->data.size(), expected));
        }
        image.pixels.insert(image.pixels.end(), ordered[i]->data.begin(), ordered[i]->data.end());
    }
    return image;
}

}  // namespace dtwin::wire
