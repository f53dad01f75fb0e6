#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "dtwin/wire/frame.hpp"

namespace dtwin::backplane {

using PortId = std::uint16_t;

/// A frame handed to the switch during one step. `seq` is the position of the
/// frame inside its sender's DONE message.
struct SentFrame {
    PortId ingress = 0;
    std::uint32_t seq = 0;
    wire::EthernetFrame frame;
};

struct RouteStats {
    std::uint64_t frames_in = 0;
    std::uint64_t unicast = 0;
    std::uint64_t broadcast_copies = 0;
    std::uint64_t flood_copies = 0;
    /// Unicast frames whose destination sits on the ingress port.
    std::uint64_t filtered = 0;

    std::uint64_t delivered() const { return unicast + broadcast_copies + flood_copies; }
};

/// Learning-switch forwarding table: MAC -> port, at most one port per MAC.
class SwitchTable {
public:
    explicit SwitchTable(std::size_t port_count) : port_count_(port_count) {}

    std::size_t port_count() const noexcept { return port_count_; }
    std::optional<PortId> lookup(const wire::MacAddress& mac) const;
    /// Records (or moves) `mac` to `port`. Multicast sources are never learned.
    void learn(const wire::MacAddress& mac, PortId port);
    const std::map<wire::MacAddress, PortId>& entries() const noexcept { return table_; }

private:
    std::size_t port_count_;
    std::map<wire::MacAddress, PortId> table_;
};

/// Forwards one step's frames. Frames are processed in (ingress, seq) order;
/// each source MAC is learned before its destination is looked up. Broadcast
/// and multicast go to every port but the sender, unknown unicast is flooded
/// the same way, known unicast goes to exactly its port.
std::vector<std::vector<wire::EthernetFrame>> switch_route(std::vector<SentFrame> frames, SwitchTable& table,
                                                           RouteStats* stats = nullptr);

}  // namespace dtwin::backplane
