#include "labseq/pump_server.hpp"

#include <algorithm>

namespace labseq {

PumpServer::PumpServer(PumpConfig cfg, TimeMode mode) : cfg_(cfg), mode_(mode) {
    validate(cfg_);
}

PumpServer::~PumpServer() {
    stop();
}

void PumpServer::start(const std::string& host, std::uint16_t port) {
    listener_ = net::Listener::bind_tcp(host, port);
    port_ = listener_.port();
    started_at_ = std::chrono::steady_clock::now();
    stop_.store(false);
    thread_ = std::thread(&PumpServer::serve_loop, this);
}

void PumpServer::stop() {
    stop_.store(true);
    if (thread_.joinable()) {
        thread_.join();
    }
    listener_.close_fd();
}

PumpState PumpServer::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

PumpConfig PumpServer::config() const {
    std::lock_guard lock(mutex_);
    return cfg_;
}

double PumpServer::device_now() const {
    if (mode_ == TimeMode::kInstant) {
        return instant_cursor_s_;
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started_at_).count();
}

void PumpServer::serve_loop() {
    while (!stop_.load()) {
        auto client = listener_.accept_client(100);
        if (!client) {
            continue;
        }
        net::LineChannel channel(*client);
        std::string line;
        while (!stop_.load()) {
            const net::RecvStatus status = channel.recv_line(line, 100);
            if (status == net::RecvStatus::kTimeout) {
                continue;
            }
            if (status == net::RecvStatus::kClosed) {
                break;  // state is preserved for the next client
            }
            std::string reply_line;
            {
                std::lock_guard lock(mutex_);
                std::string detail;
                const auto cmd = parse_pump_command(line, &detail);
                if (!cmd) {
                    reply_line = std::string("ERR PARSE ") + detail;
                } else {
                    const PumpReply reply = apply_command(state_, cfg_, *cmd, device_now());
                    if (mode_ == TimeMode::kInstant) {
                        instant_cursor_s_ = std::max(instant_cursor_s_, state_.busy_until_s);
                    }
                    reply_line = reply.line;
                }
            }
            if (!channel.send_line(reply_line)) {
                break;
            }
        }
    }
}

}  // namespace labseq
