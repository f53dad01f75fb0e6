#include "dtwin/backplane/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <charconv>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "dtwin/backplane/protocol.hpp"
#include "dtwin/error.hpp"

namespace dtwin::backplane {

namespace {

std::uint32_t read_le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

int poll_timeout_ms(SteadyClock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - SteadyClock::now()).count();
    if (left <= 0) return 0;
    return left > 1'000'000 ? 1'000'000 : static_cast<int>(left) + 1;
}

Error sys_error(std::string_view what) {
    return Error(ErrorKind::TransportError, fmt::format("{}: {}", what, std::strerror(errno)));
}

sockaddr_in to_sockaddr(const Endpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    const std::string host = ep.host == "localhost" ? "127.0.0.1" : ep.host;
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw Error(ErrorKind::TransportError, fmt::format("not an IPv4 address: '{}'", ep.host));
    }
    return addr;
}

class TcpConnection final : public Connection {
public:
    explicit TcpConnection(int fd) : fd_(fd) {
        int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    }
    ~TcpConnection() override {
        close();
        ::close(fd_);
    }

    void send(std::span<const std::uint8_t> encoded) override {
        std::size_t sent = 0;
        while (sent < encoded.size()) {
            const ssize_t n = ::send(fd_, encoded.data() + sent, encoded.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw sys_error("send");
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    Received receive(SteadyClock::time_point deadline) override {
        std::uint8_t prefix[4];
        if (auto st = read_exact(prefix, 4, deadline); st != RecvStatus::Message) return {st, {}};
        const std::uint32_t len = read_le32(prefix);
        if (len == 0 || len > kMaxMessage) {
            throw Error(ErrorKind::ProtocolError, fmt::format("bad message length {}", len));
        }
        Received r{RecvStatus::Message, std::vector<std::uint8_t>(len)};
        if (auto st = read_exact(r.body.data(), len, deadline); st != RecvStatus::Message) return {st, {}};
        return r;
    }

    void close() noexcept override {
        if (!shut_.exchange(true)) ::shutdown(fd_, SHUT_RDWR);
    }

private:
    RecvStatus read_exact(std::uint8_t* dst, std::size_t n, SteadyClock::time_point deadline) {
        std::size_t got = 0;
        while (got < n) {
            pollfd pfd{fd_, POLLIN, 0};
            const int pr = ::poll(&pfd, 1, poll_timeout_ms(deadline));
            if (pr < 0) {
                if (errno == EINTR) continue;
                throw sys_error("poll");
            }
            if (pr == 0) {
                if (SteadyClock::now() >= deadline) return RecvStatus::Timeout;
                continue;
            }
            const ssize_t r = ::recv(fd_, dst + got, n - got, 0);
            if (r == 0) return RecvStatus::Closed;
            if (r < 0) {
                if (errno == EINTR || errno == EAGAIN) continue;
                if (errno == ECONNRESET || shut_) return RecvStatus::Closed;
                throw sys_error("recv");
            }
            got += static_cast<std::size_t>(r);
        }
        return RecvStatus::Message;
    }

    int fd_;
    std::atomic<bool> shut_{false};
};

// One direction of an in-memory pipe.
struct Channel {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<std::uint8_t>> queue;
    bool closed = false;
};

class MemoryConnection final : public Connection {
public:
    MemoryConnection(std::shared_ptr<Channel> in, std::shared_ptr<Channel> out)
        : in_(std::move(in)), out_(std::move(out)) {}
    ~MemoryConnection() override { close(); }

    void send(std::span<const std::uint8_t> encoded) override {
        {
            std::lock_guard lock(out_->mu);
            if (out_->closed) throw Error(ErrorKind::TransportError, "send on closed pipe");
            out_->queue.emplace_back(encoded.begin(), encoded.end());
        }
        out_->cv.notify_one();
    }

    Received receive(SteadyClock::time_point deadline) override {
        std::unique_lock lock(in_->mu);
        if (!in_->cv.wait_until(lock, deadline, [&] { return !in_->queue.empty() || in_->closed; })) {
            return {RecvStatus::Timeout, {}};
        }
        if (in_->queue.empty()) return {RecvStatus::Closed, {}};
        std::vector<std::uint8_t> encoded = std::move(in_->queue.front());
        in_->queue.pop_front();
        lock.unlock();

        if (encoded.size() < 5 || read_le32(encoded.data()) != encoded.size() - 4) {
            throw Error(ErrorKind::ProtocolError, "bad message length on pipe");
        }
        encoded.erase(encoded.begin(), encoded.begin() + 4);
        return {RecvStatus::Message, std::move(encoded)};
    }

    void close() noexcept override {
        // Closing either end closes both directions, like a socket shutdown.
        for (auto* ch : {in_.get(), out_.get()}) {
            {
                std::lock_guard lock(ch->mu);
                ch->closed = true;
            }
            ch->cv.notify_all();
        }
    }

private:
    std::shared_ptr<Channel> in_;
    std::shared_ptr<Channel> out_;
};

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
        throw Error(ErrorKind::ParseError, fmt::format("expected host:port, got '{}'", text));
    }
    Endpoint ep;
    ep.host = std::string(text.substr(0, colon));
    const auto port = text.substr(colon + 1);
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || value > 0xFFFF) {
        throw Error(ErrorKind::ParseError, fmt::format("bad port in '{}'", text));
    }
    ep.port = static_cast<std::uint16_t>(value);
    return ep;
}

std::string Endpoint::to_string() const { return fmt::format("{}:{}", host, port); }

TcpListener::TcpListener(const Endpoint& endpoint) {
    const sockaddr_in addr = to_sockaddr(endpoint);
    fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd_ < 0) throw sys_error("socket");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(fd_, 16) < 0) {
        Error err = sys_error(fmt::format("listen on {}", endpoint.to_string()));
        ::close(fd_);
        fd_ = -1;
        throw err;
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    bound_ = Endpoint{endpoint.host, ntohs(bound.sin_port)};
}

TcpListener::~TcpListener() {
    close();
}

std::unique_ptr<Connection> TcpListener::accept(SteadyClock::time_point deadline) {
    while (fd_ >= 0) {
        pollfd pfd{fd_, POLLIN, 0};
        const int pr = ::poll(&pfd, 1, poll_timeout_ms(deadline));
        if (pr < 0) {
            if (errno == EINTR) continue;
            throw sys_error("poll");
        }
        if (pr == 0) {
            if (SteadyClock::now() >= deadline) return nullptr;
            continue;
        }
        const int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) {
            if (errno == EINTR || errno == ECONNABORTED) continue;
            throw sys_error("accept");
        }
        return std::make_unique<TcpConnection>(fd);
    }
    return nullptr;
}

void TcpListener::close() noexcept {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::unique_ptr<Connection> tcp_connect(const Endpoint& endpoint, SteadyClock::duration timeout) {
    const sockaddr_in addr = to_sockaddr(endpoint);
    const auto deadline = SteadyClock::now() + timeout;
    for (;;) {
        const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
        if (fd < 0) throw sys_error("socket");
        if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) {
            return std::make_unique<TcpConnection>(fd);
        }
        const int err = errno;
        ::close(fd);
        if (err != ECONNREFUSED || SteadyClock::now() >= deadline) {
            errno = err;
            throw sys_error(fmt::format("connect to {}", endpoint.to_string()));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

std::pair<std::unique_ptr<Connection>, std::unique_ptr<Connection>> make_memory_pipe() {
    auto a_to_b = std::make_shared<Channel>();
    auto b_to_a = std::make_shared<Channel>();
    return {std::make_unique<MemoryConnection>(b_to_a, a_to_b), std::make_unique<MemoryConnection>(a_to_b, b_to_a)};
}

struct MemoryListener::State {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::unique_ptr<Connection>> pending;
    bool closed = false;
};

MemoryListener::MemoryListener() : state_(std::make_shared<State>()) {}

MemoryListener::~MemoryListener() { close(); }

std::unique_ptr<Connection> MemoryListener::connect() {
    auto [client, server] = make_memory_pipe();
    {
        std::lock_guard lock(state_->mu);
        if (state_->closed) throw Error(ErrorKind::TransportError, "listener closed");
        state_->pending.push_back(std::move(server));
    }
    state_->cv.notify_all();
    return std::move(client);
}

std::unique_ptr<Connection> MemoryListener::accept(SteadyClock::time_point deadline) {
    std::unique_lock lock(state_->mu);
    if (!state_->cv.wait_until(lock, deadline, [&] { return !state_->pending.empty() || state_->closed; }) ||
        state_->pending.empty()) {
        return nullptr;
    }
    auto conn = std::move(state_->pending.front());
    state_->pending.pop_front();
    return conn;
}

void MemoryListener::close() noexcept {
    {
        std::lock_guard lock(state_->mu);
        state_->closed = true;
    }
    state_->cv.notify_all();
}

}  // namespace dtwin::backplane
