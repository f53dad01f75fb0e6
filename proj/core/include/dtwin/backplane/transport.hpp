#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dtwin::backplane {

using SteadyClock = std::chrono::steady_clock;

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    /// "host:port"; throws Error(ParseError).
    static Endpoint parse(std::string_view text);
    std::string to_string() const;
};

enum class RecvStatus { Message, Timeout, Closed };

struct Received {
    RecvStatus status = RecvStatus::Closed;
    /// type ‖ body, with the u32 length prefix removed.
    std::vector<std::uint8_t> body;
};

/// A bidirectional, message-framed byte stream. `send` takes a complete
/// encoding (length prefix included) as produced by encode_message.
/// `close` may be called from another thread to unblock a pending receive.
class Connection {
public:
    virtual ~Connection() = default;
    virtual void send(std::span<const std::uint8_t> encoded) = 0;
    virtual Received receive(SteadyClock::time_point deadline) = 0;
    virtual void close() noexcept = 0;
};

class Listener {
public:
    virtual ~Listener() = default;
    /// nullptr once the deadline passes.
    virtual std::unique_ptr<Connection> accept(SteadyClock::time_point deadline) = 0;
    virtual void close() noexcept = 0;
};

class TcpListener final : public Listener {
public:
    /// Binds and listens; port 0 picks an ephemeral port. Throws TransportError
    /// (for example when the port is already in use).
    explicit TcpListener(const Endpoint& endpoint);
    ~TcpListener() override;
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::unique_ptr<Connection> accept(SteadyClock::time_point deadline) override;
    void close() noexcept override;
    Endpoint local_endpoint() const { return bound_; }

private:
    int fd_ = -1;
    Endpoint bound_;
};

/// Connects over TCP, retrying refused attempts until `timeout` elapses.
std::unique_ptr<Connection> tcp_connect(const Endpoint& endpoint,
                                        SteadyClock::duration timeout = std::chrono::seconds(10));

/// Two connected in-memory ends carrying the same bytes a socket would.
std::pair<std::unique_ptr<Connection>, std::unique_ptr<Connection>> make_memory_pipe();

/// In-process listener: `connect` returns the client end and queues the
/// server end for `accept`.
class MemoryListener final : public Listener {
public:
    MemoryListener();
    ~MemoryListener() override;

    std::unique_ptr<Connection> connect();
    std::unique_ptr<Connection> accept(SteadyClock::time_point deadline) override;
    void close() noexcept override;

private:
    struct State;
    std::shared_ptr<State> state_;
};

}  // namespace dtwin::backplane
