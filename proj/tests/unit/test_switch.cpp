#include <gtest/gtest.h>

#include "dtwin/backplane/protocol.hpp"
#include "dtwin/backplane/switch_table.hpp"
#include "dtwin/error.hpp"
#include "dtwin/wire/frame.hpp"

using namespace dtwin;
using namespace dtwin::backplane;
using wire::MacAddress;

namespace {

const MacAddress A = MacAddress::local(0xA);
const MacAddress B = MacAddress::local(0xB);
const MacAddress C = MacAddress::local(0xC);
const MacAddress D = MacAddress::local(0xD);

SentFrame sent(PortId port, std::uint32_t seq, MacAddress dst, MacAddress src) {
    return {port, seq, wire::make_frame(dst, src, {static_cast<std::uint8_t>(port), static_cast<std::uint8_t>(seq)})};
}

std::vector<std::size_t> counts(const std::vector<std::vector<wire::EthernetFrame>>& out) {
    std::vector<std::size_t> c;
    for (const auto& v : out) c.push_back(v.size());
    return c;
}

}  // namespace

TEST(Switch, KnownUnicastGoesOnlyToItsPort) {
    SwitchTable table(4);
    table.learn(B, 2);
    const auto out = switch_route({sent(0, 0, B, A)}, table);
    EXPECT_EQ(counts(out), (std::vector<std::size_t>{0, 0, 1, 0}));
}

TEST(Switch, BroadcastSkipsSender) {
    SwitchTable table(4);
    RouteStats stats;
    const auto out = switch_route({sent(1, 0, MacAddress::broadcast(), A)}, table, &stats);
    EXPECT_EQ(counts(out), (std::vector<std::size_t>{1, 0, 1, 1}));
    EXPECT_EQ(stats.broadcast_copies, 3u);
}

// Five frames routed one per step through a fresh table, compared with a
// hand-simulated learning switch (A on port 0, B on 1, C on 2, D on 3).
TEST(Switch, HandSimulatedLearningTrace) {
    SwitchTable table(4);
    struct Expect {
        SentFrame frame;
        std::vector<std::size_t> delivered;
    };
    const std::vector<Expect> script = {
        {sent(0, 0, C, A), {0, 1, 1, 1}},  // C unknown: flood; learn A@0
        {sent(2, 0, A, C), {1, 0, 0, 0}},  // A known: unicast; learn C@2
        {sent(0, 0, C, A), {0, 0, 1, 0}},  // C now known: unicast
        {sent(1, 0, D, B), {1, 0, 1, 1}},  // D unknown: flood; learn B@1
        {sent(3, 0, B, D), {0, 1, 0, 0}},  // B known: unicast; learn D@3
    };
    for (std::size_t i = 0; i < script.size(); ++i) {
        const auto out = switch_route({script[i].frame}, table);
        EXPECT_EQ(counts(out), script[i].delivered) << "frame " << i;
    }
    EXPECT_EQ(table.entries().size(), 4u);
    EXPECT_EQ(table.lookup(D), PortId{3});
}

TEST(Switch, OrderIsIngressThenSeqRegardlessOfInput) {
    SwitchTable t1(3), t2(3);
    std::vector<SentFrame> frames = {sent(2, 1, MacAddress::broadcast(), C), sent(0, 0, MacAddress::broadcast(), A),
                                     sent(2, 0, MacAddress::broadcast(), C), sent(1, 0, MacAddress::broadcast(), B)};
    auto reversed = frames;
    std::reverse(reversed.begin(), reversed.end());
    const auto a = switch_route(frames, t1);
    const auto b = switch_route(reversed, t2);
    EXPECT_EQ(a, b);
    // Port 0 receives B's frame, then C's seq 0, then C's seq 1.
    ASSERT_EQ(a[0].size(), 3u);
    EXPECT_EQ(a[0][0].src, B);
    EXPECT_EQ(a[0][1].payload[1], 0);
    EXPECT_EQ(a[0][2].payload[1], 1);
}

TEST(Switch, DestinationOnIngressPortIsFiltered) {
    SwitchTable table(2);
    table.learn(B, 0);
    RouteStats stats;
    const auto out = switch_route({sent(0, 0, B, A)}, table, &stats);
    EXPECT_EQ(counts(out), (std::vector<std::size_t>{0, 0}));
    EXPECT_EQ(stats.filtered, 1u);
}

TEST(Switch, MulticastSourceNotLearned) {
    SwitchTable table(2);
    table.learn(MacAddress::broadcast(), 1);
    EXPECT_TRUE(table.entries().empty());
}

TEST(Protocol, MessagesRoundtrip) {
    const std::vector<ControlMessage> all = {
        Hello{"steering", B}, HelloAck{3, 10'000'000, 12000}, Grant{5, {{1, 2, 3}, {}}}, Done{5, {}},
        Bye{ByeReason::Timeout}};
    for (const auto& m : all) {
        const auto enc = encode_message(m);
        const std::uint32_t len = enc[0] | (enc[1] << 8) | (enc[2] << 16) | (static_cast<std::uint32_t>(enc[3]) << 24);
        ASSERT_EQ(len + 4, enc.size());
        EXPECT_EQ(decode_message(std::span(enc).subspan(4)), m);
    }
}

TEST(Protocol, MalformedMessagesRejected) {
    auto enc = encode_message(Done{1, {{9, 9}}});
    auto body = std::vector<std::uint8_t>(enc.begin() + 4, enc.end());
    body.push_back(0);
    EXPECT_THROW(decode_message(body), Error);
    body.resize(body.size() - 3);
    EXPECT_THROW(decode_message(body), Error);
    EXPECT_THROW(decode_message(std::vector<std::uint8_t>{0x42}), Error);
    EXPECT_THROW(decode_message(std::vector<std::uint8_t>{}), Error);
}
