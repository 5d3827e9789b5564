#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>

#include "labseq/net.hpp"
#include "labseq/pump.hpp"

namespace labseq {

/// Simulated syringe pump behind the TCP line protocol.
///
/// Serves one client connection at a time; further connections wait in the
/// listen backlog until the current client disconnects. State survives
/// disconnects. Every request line gets exactly one reply line, in order.
class PumpServer {
public:
    enum class TimeMode {
        /// Device time jumps past each motion; commands complete instantly
        /// and the pump is never observed busy. Deterministic.
        kInstant,
        /// Device time is wall time; commands issued while a motion is still
        /// in progress are refused with ERR BUSY.
        kWall,
    };

    explicit PumpServer(PumpConfig cfg, TimeMode mode = TimeMode::kInstant);
    ~PumpServer();

    PumpServer(const PumpServer&) = delete;
    PumpServer& operator=(const PumpServer&) = delete;

    /// Binds host:port (port 0 picks a free one) and starts the accept
    /// thread. Throws BindError.
    void start(const std::string& host, std::uint16_t port);

    void stop();

    std::uint16_t port() const { return port_; }

    PumpState state() const;
    PumpConfig config() const;

private:
    void serve_loop();
    double device_now() const;

    mutable std::mutex mutex_;
    PumpConfig cfg_;
    PumpState state_;
    double instant_cursor_s_ = 0.0;
    TimeMode mode_;
    std::chrono::steady_clock::time_point started_at_;

    net::Listener listener_;
    std::thread thread_;
    std::atomic<bool> stop_{false};
    std::uint16_t port_ = 0;
};

}  // namespace labseq
