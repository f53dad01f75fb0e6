#include "dtwin/harness/runner.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dtwin/backplane/trace.hpp"
#include "dtwin/environment/environment_client.hpp"
#include "dtwin/error.hpp"
#include "dtwin/perception/perception_client.hpp"
#include "dtwin/steering/steering_client.hpp"
#include "dtwin/vehicle/vehicle_client.hpp"

extern char** environ;

namespace dtwin::harness {

namespace bp = backplane;

namespace {

template <class Client>
gateway::ComputeFn share(Client client) {
    auto p = std::make_shared<Client>(std::move(client));
    return [p](const gateway::Inbox& inbox) { return (*p)(inbox); };
}

std::string self_executable() {
    std::error_code ec;
    auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
    if (ec) throw Error(ErrorKind::SpawnError, "cannot locate the running executable");
    return p.string();
}

class TempFile {
public:
    explicit TempFile(const std::string& contents) {
        std::string tmpl = (std::filesystem::temp_directory_path() / "dtwin-scenario-XXXXXX").string();
        const int fd = ::mkstemp(tmpl.data());
        if (fd < 0) throw Error(ErrorKind::SpawnError, fmt::format("mkstemp: {}", std::strerror(errno)));
        ::close(fd);
        path_ = tmpl;
        std::ofstream out(path_, std::ios::binary | std::ios::trunc);
        out << contents;
        if (!out) throw Error(ErrorKind::SpawnError, fmt::format("cannot write {}", path_));
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

pid_t spawn(const std::vector<std::string>& args) {
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    pid_t pid = 0;
    const int rc = ::posix_spawn(&pid, argv[0], nullptr, nullptr, argv.data(), environ);
    if (rc != 0) throw Error(ErrorKind::SpawnError, fmt::format("cannot spawn {}: {}", args[0], std::strerror(rc)));
    return pid;
}

int reap(pid_t pid) {
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) return -1;
    }
    return status;
}

}  // namespace

void check_roster(const Scenario& scenario) {
    std::vector<std::string> missing;
    for (Role r : kAllRoles) {
        const bool present = std::any_of(scenario.roster.begin(), scenario.roster.end(),
                                         [&](const auto& e) { return e.name == role_name(r); });
        if (!present) missing.emplace_back(role_name(r));
    }
    if (!missing.empty()) {
        throw Error(ErrorKind::RosterMismatch, fmt::format("roster lacks: {}", fmt::join(missing, ", ")));
    }
    for (const auto& e : scenario.roster) {
        if (!parse_role(e.name)) {
            throw Error(ErrorKind::RosterMismatch, fmt::format("roster entry '{}' is not a known role", e.name));
        }
    }
}

gateway::ComputeFn make_behavior(const Scenario& s, Role role) {
    const double dt = static_cast<double>(s.dt_ns) * 1e-9;
    switch (role) {
        case Role::Vehicle:
            return share(vehicle::VehicleClient(s.vehicle, s.initial_state(), dt));
        case Role::Environment:
            return share(environment::EnvironmentClient(s.make_track(), s.camera, s.initial_state(),
                                                        s.mac_of(Role::Perception), s.seed.value_or(0)));
        case Role::Steering:
            return share(steering::SteeringClient(s.make_track(), s.pure_pursuit(), s.mac_of(Role::Vehicle)));
        case Role::Perception:
            return share(perception::PerceptionClient(s.speed_control, dt, s.mac_of(Role::Vehicle)));
    }
    throw Error(ErrorKind::ValidationError, "unknown role");
}

void run_client(const Scenario& scenario, Role role, std::unique_ptr<bp::Connection> connection) {
    const auto compute = make_behavior(scenario, role);
    const auto timeout = std::chrono::milliseconds(std::llround(scenario.join_timeout_s * 1000.0)) +
                         std::chrono::milliseconds(std::llround(scenario.barrier_timeout_s * 1000.0));
    auto handle = gateway::ClientHandle::connect(std::move(connection), std::string(role_name(role)),
                                                 scenario.mac_of(role), timeout);
    while (handle.step(compute) == gateway::StepStatus::Running) {
    }
    handle.close();
}

void run_client(const Scenario& scenario, Role role, const bp::Endpoint& endpoint) {
    const auto timeout = std::chrono::milliseconds(std::llround(scenario.join_timeout_s * 1000.0));
    run_client(scenario, role, bp::tcp_connect(endpoint, timeout));
}

namespace {

// Trace sink and backplane, opened before any client starts so a bad trace
// path fails fast instead of stranding joined clients.
class PreparedSession {
public:
    PreparedSession(const Scenario& scenario, const RunOptions& options)
        : scenario_(scenario),
          trace_path_(options.trace_path.empty() ? scenario.trace_path : options.trace_path),
          config_(scenario.session_config()),
          track_(scenario.make_track()),
          writer_(trace_path_, config_.dt_ns),
          recorder_(writer_, scenario.mac_of(Role::Vehicle),
                    [this](double x, double y) { return track_.project({x, y}).cte; }),
          backplane_(config_) {
        backplane_.add_observer(&recorder_);
        for (auto* o : options.observers) backplane_.add_observer(o);
    }

    RunResult run(bp::Listener& listener) {
        RunResult result;
        result.trace_path = trace_path_;
        result.report = backplane_.run(listener);
        result.report.resolved_config = serialize_scenario(scenario_);
        return result;
    }

private:
    const Scenario& scenario_;
    std::string trace_path_;
    bp::SessionConfig config_;
    environment::Track track_;
    bp::TraceWriter writer_;
    bp::TraceRecorder recorder_;
    bp::Backplane backplane_;
};

}  // namespace

RunResult run_backplane(const Scenario& scenario, bp::Listener& listener, const RunOptions& options) {
    PreparedSession session(scenario, options);
    return session.run(listener);
}

RunResult run_in_process(const Scenario& scenario, const RunOptions& options) {
    check_roster(scenario);
    PreparedSession session(scenario, options);
    bp::MemoryListener listener;

    std::mutex mu;
    std::exception_ptr first_failure;
    std::vector<std::thread> threads;
    for (Role role : kAllRoles) {
        threads.emplace_back([&, role, conn = listener.connect()]() mutable {
            try {
                run_client(scenario, role, std::move(conn));
            } catch (...) {
                std::lock_guard lock(mu);
                if (!first_failure) first_failure = std::current_exception();
            }
        });
    }

    RunResult result;
    std::exception_ptr session_failure;
    try {
        result = session.run(listener);
    } catch (...) {
        session_failure = std::current_exception();
    }
    listener.close();
    for (auto& t : threads) t.join();
    if (session_failure) std::rethrow_exception(session_failure);
    return result;
}

RunResult run_multi_process(const Scenario& scenario, const RunOptions& options) {
    check_roster(scenario);
    const std::string exe = options.client_executable.empty() ? self_executable() : options.client_executable;
    const TempFile config(serialize_scenario(scenario));
    PreparedSession session(scenario, options);

    bp::TcpListener listener(bp::Endpoint{"127.0.0.1", 0});
    const std::string address = listener.local_endpoint().to_string();

    std::vector<pid_t> children;
    const auto kill_all = [&] {
        for (pid_t pid : children) ::kill(pid, SIGTERM);
        for (pid_t pid : children) reap(pid);
        children.clear();
    };

    try {
        for (Role role : kAllRoles) {
            const pid_t pid =
                spawn({exe, "client", std::string(role_name(role)), "--config", config.path(), "--connect", address});
            children.push_back(pid);
            if (options.on_spawn) options.on_spawn(role, pid);
        }
    } catch (...) {
        kill_all();
        throw;
    }

    RunResult result;
    try {
        result = session.run(listener);
    } catch (...) {
        kill_all();
        throw;
    }
    for (pid_t pid : children) reap(pid);
    return result;
}

}  // namespace dtwin::harness
