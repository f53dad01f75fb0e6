#include "dtwin/backplane/switch_table.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "dtwin/error.hpp"

namespace dtwin::backplane {

std::optional<PortId> SwitchTable::lookup(const wire::MacAddress& mac) const {
    if (auto it = table_.find(mac); it != table_.end()) return it->second;
    return std::nullopt;
}

void SwitchTable::learn(const wire::MacAddress& mac, PortId port) {
    if (mac.is_multicast()) return;
    if (port >= port_count_) throw Error(ErrorKind::ProtocolError, fmt::format("port {} out of range", port));
    table_[mac] = port;
}

std::vector<std::vector<wire::EthernetFrame>> switch_route(std::vector<SentFrame> frames, SwitchTable& table,
                                                           RouteStats* stats) {
    std::stable_sort(frames.begin(), frames.end(), [](const SentFrame& a, const SentFrame& b) {
        return a.ingress != b.ingress ? a.ingress < b.ingress : a.seq < b.seq;
    });

    RouteStats local;
    RouteStats& st = stats ? *stats : local;
    std::vector<std::vector<wire::EthernetFrame>> out(table.port_count());

    const auto to_all_but = [&](const SentFrame& f, std::uint64_t& counter) {
        for (PortId p = 0; p < table.port_count(); ++p) {
            if (p == f.ingress) continue;
            out[p].push_back(f.frame);
            ++counter;
        }
    };

    for (auto& f : frames) {
        ++st.frames_in;
        table.learn(f.frame.src, f.ingress);
        if (f.frame.dst.is_multicast()) {
            to_all_but(f, st.broadcast_copies);
        } else if (auto port = table.lookup(f.frame.dst)) {
            if (*port == f.ingress) {
                ++st.filtered;
            } else {
                out[*port].push_back(std::move(f.frame));
                ++st.unicast;
            }
        } else {
            to_all_but(f, st.flood_copies);
        }
    }
    return out;
}

}  // namespace dtwin::backplane
