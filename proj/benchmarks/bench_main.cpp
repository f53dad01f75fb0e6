#include <random>

#include <benchmark/benchmark.h>

#include "dtwin/backplane/switch_table.hpp"
#include "dtwin/environment/camera.hpp"
#include "dtwin/harness/runner.hpp"
#include "dtwin/harness/scenario.hpp"
#include "dtwin/perception/sign_detector.hpp"
#include "dtwin/wire/crc32.hpp"
#include "dtwin/wire/fragment.hpp"
#include "dtwin/wire/frame.hpp"

using namespace dtwin;

static std::vector<std::uint8_t> noise(std::size_t n) {
    std::mt19937_64 rng(1);
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng());
    return v;
}

static void BM_Crc32(benchmark::State& state) {
    const auto data = noise(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(wire::crc32(data));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Crc32)->Arg(64)->Arg(1500)->Arg(9216);

static void BM_FrameRoundtrip(benchmark::State& state) {
    const auto f = wire::make_frame(wire::MacAddress::local(1), wire::MacAddress::local(2), noise(1400));
    for (auto _ : state) {
        auto bytes = wire::encode_frame(f);
        benchmark::DoNotOptimize(wire::decode_frame(bytes));
    }
}
BENCHMARK(BM_FrameRoundtrip);

static void BM_FragmentReassemble(benchmark::State& state) {
    const wire::CameraFrame img{64, 48, noise(64 * 48 * 3)};
    for (auto _ : state) {
        auto frags = wire::fragment_payload(img, 0);
        benchmark::DoNotOptimize(wire::reassemble(frags));
    }
}
BENCHMARK(BM_FragmentReassemble);

static environment::Track bench_track() {
    return environment::Track({{0, 0}, {300, 0}}, 1.75, false, {{26, 40}});
}

static void BM_RenderCamera(benchmark::State& state) {
    const auto t = bench_track();
    for (auto _ : state) benchmark::DoNotOptimize(environment::render_camera({10, 0, 0, 8, 0}, t, {}));
}
BENCHMARK(BM_RenderCamera);

static void BM_DetectSign(benchmark::State& state) {
    const auto frame = environment::render_camera({10, 0, 0, 8, 0}, bench_track(), {});
    for (auto _ : state) benchmark::DoNotOptimize(perception::detect_sign(frame));
}
BENCHMARK(BM_DetectSign);

static void BM_SwitchRoute(benchmark::State& state) {
    std::vector<backplane::SentFrame> frames;
    for (std::uint16_t p = 0; p < 4; ++p) {
        for (std::uint32_t s = 0; s < 8; ++s) {
            const auto dst = s % 2 ? wire::MacAddress::broadcast() : wire::MacAddress::local((p + 1) % 4 + 1);
            frames.push_back({p, s, wire::make_frame(dst, wire::MacAddress::local(p + 1), noise(64))});
        }
    }
    backplane::SwitchTable table(4);
    for (auto _ : state) benchmark::DoNotOptimize(backplane::switch_route(frames, table));
}
BENCHMARK(BM_SwitchRoute);

static void BM_InProcessSession(benchmark::State& state) {
    auto s = harness::parse_scenario_text("duration_s: 1\ntrack: {waypoints: [[0,0],[300,0]]}\nsigns: [{s: 30, limit_kmh: 40}]\n");
    harness::RunOptions opts;
    opts.trace_path = "/dev/null";
    for (auto _ : state) benchmark::DoNotOptimize(harness::run_in_process(s, opts));
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_InProcessSession)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
