#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace labseq::net {

/// Listening TCP socket. Move-only; closes on destruction.
class Listener {
public:
    Listener() = default;
    Listener(Listener&& other) noexcept;
    Listener& operator=(Listener&& other) noexcept;
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;
    ~Listener();

    /// Binds and listens. Port 0 picks a free port (see port()).
    /// Throws BindError on failure.
    static Listener bind_tcp(const std::string& host, std::uint16_t port);

    /// Accepted client fd, or nullopt on timeout. -1 timeout blocks.
    std::optional<int> accept_client(int timeout_ms);

    std::uint16_t port() const { return port_; }
    bool valid() const { return fd_ >= 0; }
    void close_fd();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Connected client fd. Throws TransportError on failure.
int connect_tcp(const std::string& host, std::uint16_t port, int timeout_ms = 5000);

enum class RecvStatus { kLine, kClosed, kTimeout };

/// Newline-delimited text over a connected socket. Owns the fd.
class LineChannel {
public:
    LineChannel() = default;
    explicit LineChannel(int fd) : fd_(fd) {}
    LineChannel(LineChannel&& other) noexcept;
    LineChannel& operator=(LineChannel&& other) noexcept;
    LineChannel(const LineChannel&) = delete;
    LineChannel& operator=(const LineChannel&) = delete;
    ~LineChannel();

    /// Appends "\n" and writes fully. False on any socket error.
    bool send_line(std::string_view line);

    /// Reads one line (terminator stripped) into out.
    RecvStatus recv_line(std::string& out, int timeout_ms);

    bool valid() const { return fd_ >= 0; }
    void close_fd();

private:
    int fd_ = -1;
    std::string buffer_;
};

}  // namespace labseq::net
