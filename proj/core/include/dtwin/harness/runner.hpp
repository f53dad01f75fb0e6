#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <sys/types.h>

#include "dtwin/backplane/session.hpp"
#include "dtwin/gateway/client_handle.hpp"
#include "dtwin/harness/scenario.hpp"

namespace dtwin::harness {

struct RunOptions {
    /// Overrides Scenario::trace_path when non-empty.
    std::string trace_path;
    /// Extra observers, attached after the trace recorder.
    std::vector<backplane::SessionObserver*> observers;
    /// Executable spawned for `client <role>` in multi-process mode; defaults
    /// to the running program.
    std::string client_executable;
    /// Called once per spawned child.
    std::function<void(Role, pid_t)> on_spawn;
};

struct RunResult {
    backplane::SessionReport report;
    std::string trace_path;
};

/// The per-step logic of one client, wired from the scenario.
gateway::ComputeFn make_behavior(const Scenario& scenario, Role role);

/// Throws RosterMismatch unless the roster names exactly the four roles.
void check_roster(const Scenario& scenario);

/// Joins as `role` and steps until the session finishes.
void run_client(const Scenario& scenario, Role role, std::unique_ptr<backplane::Connection> connection);
void run_client(const Scenario& scenario, Role role, const backplane::Endpoint& endpoint);

/// Runs the backplane on `listener` with a trace recorder attached. Used by
/// both run modes and by `serve`.
RunResult run_backplane(const Scenario& scenario, backplane::Listener& listener, const RunOptions& options);

/// Backplane and all four clients in this process over in-memory pipes.
RunResult run_in_process(const Scenario& scenario, const RunOptions& options = {});

/// Backplane here, each client a child process connected over TCP loopback.
/// Throws SpawnError when a child cannot be started.
RunResult run_multi_process(const Scenario& scenario, const RunOptions& options = {});

}  // namespace dtwin::harness
