#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dtwin/backplane/transport.hpp"
#include "dtwin/error.hpp"
#include "dtwin/harness/runner.hpp"
#include "dtwin/harness/scenario.hpp"
#include "dtwin/harness/summary.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSession = 3;

using namespace dtwin;

harness::Scenario load(const std::string& path, std::optional<std::uint64_t> seed) {
    auto s = harness::parse_scenario(path);
    if (seed) s.seed = seed;
    return s;
}

void emit_report(const harness::RunResult& result, const std::string& report_path) {
    const std::string json = result.report.to_json().dump(2) + "\n";
    if (report_path.empty()) {
        std::cout << json;
        return;
    }
    std::ofstream out(report_path, std::ios::trunc);
    out << json;
    if (!out) throw Error(ErrorKind::SinkError, fmt::format("cannot write report '{}'", report_path));
    fmt::print(stderr, "{} steps, trace {}, report {}\n", result.report.steps, result.trace_path, report_path);
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError:
        case ErrorKind::ValidationError: return kExitConfig;
        default: return kExitSession;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed digital-twin co-simulation harness"};
    app.require_subcommand(1);

    std::string config;
    std::string trace;
    std::string report;
    std::string address;
    std::optional<std::uint64_t> seed;
    bool multi_process = false;

    auto* run = app.add_subcommand("run", "Run a scenario (backplane and all clients)");
    run->add_option("--config", config, "Scenario file")->required();
    run->add_option("--trace", trace, "Trace CSV path (overrides the scenario)");
    run->add_option("--seed", seed, "Camera noise seed");
    run->add_option("--report", report, "Write the session report JSON here instead of stdout");
    run->add_flag("--multi-process", multi_process, "Spawn each client as its own process over TCP");

    auto* serve = app.add_subcommand("serve", "Run only the backplane and wait for clients");
    serve->add_option("--config", config, "Scenario file")->required();
    serve->add_option("--listen", address, "host:port to listen on")->required();
    serve->add_option("--trace", trace, "Trace CSV path (overrides the scenario)");
    serve->add_option("--seed", seed, "Camera noise seed (clients must agree)");
    serve->add_option("--report", report, "Write the session report JSON here instead of stdout");

    std::string role_text;
    auto* client = app.add_subcommand("client", "Run a single client and connect to a backplane");
    client->add_option("role", role_text, "vehicle | environment | steering | perception")
        ->required()
        ->check(CLI::IsMember({"vehicle", "environment", "steering", "perception"}));
    client->add_option("--config", config, "Scenario file")->required();
    client->add_option("--connect", address, "Backplane host:port")->required();
    client->add_option("--seed", seed, "Camera noise seed");

    std::string out_dir = ".";
    std::optional<double> initial_target;
    auto* summarize = app.add_subcommand("summarize", "Summarize a trace and write plot data");
    summarize->add_option("--trace", trace, "Trace CSV")->required();
    summarize->add_option("--out", out_dir, "Output directory for plots and summary.json");
    summarize->add_option("--initial-target", initial_target, "Speed target before the first detection [m/s]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            const auto s = load(config, seed);
            harness::RunOptions opts;
            opts.trace_path = trace;
            const auto result = multi_process ? harness::run_multi_process(s, opts) : harness::run_in_process(s, opts);
            emit_report(result, report);
        } else if (*serve) {
            const auto s = load(config, seed);
            harness::check_roster(s);
            harness::RunOptions opts;
            opts.trace_path = trace;
            backplane::TcpListener listener(backplane::Endpoint::parse(address));
            fmt::print(stderr, "listening on {}\n", listener.local_endpoint().to_string());
            emit_report(harness::run_backplane(s, listener, opts), report);
        } else if (*client) {
            const auto s = load(config, seed);
            harness::run_client(s, *harness::parse_role(role_text), backplane::Endpoint::parse(address));
        } else if (*summarize) {
            const auto t = harness::read_trace(trace);
            harness::SummaryOptions opts;
            opts.initial_target_mps = initial_target;
            const auto summary = harness::summarize_trace(t, opts);
            harness::write_summary_files(t, summary, out_dir);
            std::cout << summary.to_json().dump(2) << "\n";
        }
    } catch (const Error& e) {
        fmt::print(stderr, "dtwin: {}\n", e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        fmt::print(stderr, "dtwin: {}\n", e.what());
        return kExitSession;
    }
    return 0;
}
