#include "labseq/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "labseq/errors.hpp"

namespace labseq::net {

namespace {

in_addr resolve_host(const std::string& host) {
    in_addr addr{};
    const std::string name = (host == "localhost" || host.empty()) ? "127.0.0.1" : host;
    if (inet_pton(AF_INET, name.c_str(), &addr) != 1) {
        throw TransportError("cannot resolve host '" + host + "' (IPv4 dotted quad expected)");
    }
    return addr;
}

bool wait_readable(int fd, int timeout_ms) {
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, timeout_ms);
    return rc > 0 && (p.revents & (POLLIN | POLLHUP | POLLERR)) != 0;
}

}  // namespace

Listener::Listener(Listener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
    other.fd_ = -1;
    other.port_ = 0;
}

Listener& Listener::operator=(Listener&& other) noexcept {
    if (this != &other) {
        close_fd();
        fd_ = std::exchange(other.fd_, -1);
        port_ = std::exchange(other.port_, static_cast<std::uint16_t>(0));
    }
    return *this;
}

Listener::~Listener() {
    close_fd();
}

void Listener::close_fd() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Listener Listener::bind_tcp(const std::string& host, std::uint16_t port) {
    in_addr addr{};
    try {
        addr = resolve_host(host);
    } catch (const TransportError& e) {
        throw BindError(e.what());
    }

    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) {
        throw BindError(std::string("socket: ") + std::strerror(errno));
    }
    const int yes = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));

    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_addr = addr;
    sa.sin_port = htons(port);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
        const std::string detail = std::strerror(errno);
        ::close(fd);
        throw BindError("cannot bind " + host + ":" + std::to_string(port) + ": " + detail);
    }
    if (::listen(fd, 8) != 0) {
        const std::string detail = std::strerror(errno);
        ::close(fd);
        throw BindError("listen: " + detail);
    }

    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);

    Listener listener;
    listener.fd_ = fd;
    listener.port_ = ntohs(bound.sin_port);
    return listener;
}

std::optional<int> Listener::accept_client(int timeout_ms) {
    if (fd_ < 0 || !wait_readable(fd_, timeout_ms)) {
        return std::nullopt;
    }
    const int client = ::accept(fd_, nullptr, nullptr);
    if (client < 0) {
        return std::nullopt;
    }
    const int yes = 1;
    ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof(yes));
    return client;
}

int connect_tcp(const std::string& host, std::uint16_t port, int timeout_ms) {
    const in_addr addr = resolve_host(host);
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) {
        throw TransportError(std::string("socket: ") + std::strerror(errno));
    }

    // Non-blocking connect so we can honor the timeout.
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);

    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_addr = addr;
    sa.sin_port = htons(port);
    int rc = ::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa));
    if (rc != 0 && errno != EINPROGRESS) {
        const std::string detail = std::strerror(errno);
        ::close(fd);
        throw TransportError("cannot connect to " + host + ":" + std::to_string(port) + ": " +
                             detail);
    }
    if (rc != 0) {
        pollfd p{fd, POLLOUT, 0};
        rc = ::poll(&p, 1, timeout_ms);
        int err = 0;
        socklen_t len = sizeof(err);
        if (rc <= 0 ||
            ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len) != 0 || err != 0) {
            ::close(fd);
            throw TransportError("cannot connect to " + host + ":" + std::to_string(port) + ": " +
                                 (rc <= 0 ? "timeout" : std::strerror(err)));
        }
    }
    ::fcntl(fd, F_SETFL, flags);
    const int yes = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof(yes));
    return fd;
}

LineChannel::LineChannel(LineChannel&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), buffer_(std::move(other.buffer_)) {}

LineChannel& LineChannel::operator=(LineChannel&& other) noexcept {
    if (this != &other) {
        close_fd();
        fd_ = std::exchange(other.fd_, -1);
        buffer_ = std::move(other.buffer_);
    }
    return *this;
}

LineChannel::~LineChannel() {
    close_fd();
}

void LineChannel::close_fd() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

bool LineChannel::send_line(std::string_view line) {
    if (fd_ < 0) {
        return false;
    }
    std::string out(line);
    out.push_back('\n');
    std::size_t sent = 0;
    while (sent < out.size()) {
        const ssize_t n = ::send(fd_, out.data() + sent, out.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

RecvStatus LineChannel::recv_line(std::string& out, int timeout_ms) {
    while (true) {
        const std::size_t pos = buffer_.find('\n');
        if (pos != std::string::npos) {
            out.assign(buffer_, 0, pos);
            buffer_.erase(0, pos + 1);
            return RecvStatus::kLine;
        }
        if (fd_ < 0) {
            return RecvStatus::kClosed;
        }
        if (!wait_readable(fd_, timeout_ms)) {
            return RecvStatus::kTimeout;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n == 0) {
            return RecvStatus::kClosed;
        }
        if (n < 0) {
            if (errno == EINTR) continue;
            return RecvStatus::kClosed;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

}  // namespace labseq::net
