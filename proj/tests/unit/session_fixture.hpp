#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "dtwin/backplane/session.hpp"
#include "dtwin/backplane/transport.hpp"
#include "dtwin/gateway/client_handle.hpp"

namespace dtwin::testing {

inline backplane::SessionConfig make_config(std::size_t clients, std::uint64_t steps) {
    backplane::SessionConfig c;
    c.dt_ns = 10'000'000;
    c.total_steps = steps;
    c.barrier_timeout = std::chrono::seconds(10);
    c.join_timeout = std::chrono::seconds(10);
    for (std::size_t i = 0; i < clients; ++i) {
        c.roster.push_back({"c" + std::to_string(i), wire::MacAddress::local(static_cast<std::uint16_t>(i + 1))});
    }
    return c;
}

/// Backplane plus one thread per roster entry, all in memory. Client errors
/// are collected rather than rethrown.
struct ScriptedSession {
    backplane::SessionConfig config;
    std::vector<gateway::ComputeFn> behaviors;
    std::vector<backplane::SessionObserver*> observers;
    std::vector<std::exception_ptr> client_errors;

    backplane::SessionReport run() {
        backplane::MemoryListener listener;
        backplane::Backplane bp(config);
        for (auto* o : observers) bp.add_observer(o);
        client_errors.assign(behaviors.size(), nullptr);
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < behaviors.size(); ++i) {
            threads.emplace_back([&, i, conn = listener.connect()]() mutable {
                try {
                    auto h = gateway::ClientHandle::connect(std::move(conn), config.roster[i].name,
                                                            config.roster[i].mac, std::chrono::seconds(10));
                    while (!h.finished()) h.step(behaviors[i]);
                } catch (...) {
                    client_errors[i] = std::current_exception();
                }
            });
        }
        std::exception_ptr failure;
        backplane::SessionReport report;
        try {
            report = bp.run(listener);
        } catch (...) {
            failure = std::current_exception();
        }
        for (auto& t : threads) t.join();
        if (failure) std::rethrow_exception(failure);
        return report;
    }
};

}  // namespace dtwin::testing
