#include "labseq/pump.hpp"

#include <charconv>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace labseq {

namespace {

std::string fmt(const char* format, ...)
#if defined(__GNUC__)
    __attribute__((format(printf, 1, 2)))
#endif
    ;

std::string fmt(const char* format, ...) {
    char buf[160];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

PumpReply error_reply(PumpErrorCode code, const std::string& message) {
    PumpReply reply;
    reply.ok = false;
    reply.error = code;
    reply.line = std::string("ERR ") + to_string(code) + " " + message;
    return reply;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t start = i;
        while (i < s.size() && s[i] != ' ') ++i;
        if (i > start) tokens.push_back(s.substr(start, i - start));
    }
    return tokens;
}

bool parse_double(std::string_view token, double& out) {
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

bool parse_int(std::string_view token, int& out) {
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

const char* to_string(PumpErrorCode code) {
    switch (code) {
        case PumpErrorCode::kOverflow: return "OVERFLOW";
        case PumpErrorCode::kUnderflow: return "UNDERFLOW";
        case PumpErrorCode::kBusy: return "BUSY";
        case PumpErrorCode::kParse: return "PARSE";
    }
    return "UNKNOWN";
}

void validate(const PumpConfig& cfg) {
    if (!(cfg.step_angle_deg > 0.0) || !std::isfinite(cfg.step_angle_deg)) {
        throw std::invalid_argument("step angle must be positive");
    }
    const double steps = 360.0 / cfg.step_angle_deg;
    if (std::abs(steps - std::round(steps)) > 1e-9) {
        throw std::invalid_argument("step angle must divide 360 into whole steps");
    }
    switch (cfg.microstep_divisor) {
        case 1:
        case 2:
        case 4:
        case 8:
        case 16:
        case 32: break;
        default: throw std::invalid_argument("microstep divisor must be one of 1,2,4,8,16,32");
    }
    if (!(cfg.lead_pitch_mm > 0.0) || !(cfg.stroke_length_mm > 0.0) || !(cfg.capacity_ul > 0.0) ||
        !(cfg.step_rate > 0.0) || !std::isfinite(cfg.lead_pitch_mm) ||
        !std::isfinite(cfg.stroke_length_mm) || !std::isfinite(cfg.capacity_ul) ||
        !std::isfinite(cfg.step_rate)) {
        throw std::invalid_argument("pump geometry and step rate must be positive");
    }
}

double steps_per_revolution(const PumpConfig& cfg) {
    return 360.0 / cfg.step_angle_deg;
}

double microsteps_per_microliter(const PumpConfig& cfg) {
    const double microsteps_per_mm = steps_per_revolution(cfg) * cfg.microstep_divisor / cfg.lead_pitch_mm;
    return microsteps_per_mm * cfg.stroke_length_mm / cfg.capacity_ul;
}

std::int64_t volume_to_microsteps(const PumpConfig& cfg, double volume_ul) {
    validate(cfg);
    if (!(volume_ul >= 0.0) || !std::isfinite(volume_ul)) {
        throw std::invalid_argument("volume must be non-negative and finite");
    }
    if (volume_ul > cfg.capacity_ul) {
        throw CapacityError("volume " + std::to_string(volume_ul) + " uL exceeds capacity " +
                            std::to_string(cfg.capacity_ul) + " uL");
    }
    return std::llrint(volume_ul * microsteps_per_microliter(cfg));
}

double microsteps_to_volume(const PumpConfig& cfg, std::int64_t microsteps) {
    validate(cfg);
    return static_cast<double>(microsteps) / microsteps_per_microliter(cfg);
}

double transfer_duration(const PumpConfig& cfg, double volume_ul) {
    return static_cast<double>(volume_to_microsteps(cfg, volume_ul)) / cfg.step_rate;
}

namespace {

PumpReply apply_draw(PumpState& state, const PumpConfig& cfg, double volume, double now_s) {
    if (!(volume >= 0.0) || !std::isfinite(volume)) {
        return error_reply(PumpErrorCode::kParse, "invalid volume");
    }
    if (state.plunger_volume_ul + volume > cfg.capacity_ul) {
        return error_reply(PumpErrorCode::kOverflow,
                           fmt("draw %.1f exceeds capacity (plunger %.1f/%.1f)", volume,
                               state.plunger_volume_ul, cfg.capacity_ul));
    }
    PumpReply reply;
    reply.ok = true;
    reply.duration_s = transfer_duration(cfg, volume);
    state.plunger_volume_ul += volume;
    state.busy_until_s = now_s + reply.duration_s;
    reply.line = fmt("OK DRAW %.1f %.3f", volume, reply.duration_s);
    return reply;
}

PumpReply apply_push(PumpState& state, const PumpConfig& cfg, double volume, double now_s) {
    if (!(volume >= 0.0) || !std::isfinite(volume)) {
        return error_reply(PumpErrorCode::kParse, "invalid volume");
    }
    if (volume > state.plunger_volume_ul) {
        return error_reply(PumpErrorCode::kUnderflow,
                           fmt("push %.1f exceeds plunger volume %.1f", volume,
                               state.plunger_volume_ul));
    }
    PumpReply reply;
    reply.ok = true;
    reply.duration_s = transfer_duration(cfg, volume);
    state.plunger_volume_ul -= volume;
    state.busy_until_s = now_s + reply.duration_s;
    reply.line = fmt("OK PUSH %.1f %.3f", volume, reply.duration_s);
    return reply;
}

PumpReply apply_flush(PumpState& state, const PumpConfig& cfg, int cycles, double now_s) {
    if (cycles < 0) {
        return error_reply(PumpErrorCode::kParse, "flush count must be non-negative");
    }
    // Each wash cycle draws to a full syringe and pushes the full stroke out.
    std::int64_t microsteps = 0;
    double plunger = state.plunger_volume_ul;
    for (int i = 0; i < cycles; ++i) {
        microsteps += volume_to_microsteps(cfg, cfg.capacity_ul - plunger);
        microsteps += volume_to_microsteps(cfg, cfg.capacity_ul);
        plunger = 0.0;
    }
    PumpReply reply;
    reply.ok = true;
    reply.duration_s = static_cast<double>(microsteps) / cfg.step_rate;
    state.plunger_volume_ul = plunger;
    state.busy_until_s = now_s + reply.duration_s;
    reply.line = fmt("OK FLUSH %d %.3f", cycles, reply.duration_s);
    return reply;
}

PumpReply apply_home(PumpState& state, const PumpConfig& cfg, double now_s) {
    PumpReply reply;
    reply.ok = true;
    reply.duration_s = transfer_duration(cfg, state.plunger_volume_ul);
    state.plunger_volume_ul = 0.0;
    state.busy_until_s = now_s + reply.duration_s;
    reply.line = fmt("OK HOME %.3f", reply.duration_s);
    return reply;
}

}  // namespace

PumpReply apply_command(PumpState& state, PumpConfig& cfg, const PumpCommand& cmd, double now_s) {
    if (state.busy(now_s) && !std::holds_alternative<StatusCmd>(cmd)) {
        return error_reply(PumpErrorCode::kBusy, "pump is moving");
    }
    return std::visit(
        [&](const auto& c) -> PumpReply {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, DrawCmd>) {
                return apply_draw(state, cfg, c.volume_ul, now_s);
            } else if constexpr (std::is_same_v<T, PushCmd>) {
                return apply_push(state, cfg, c.volume_ul, now_s);
            } else if constexpr (std::is_same_v<T, FlushCmd>) {
                return apply_flush(state, cfg, c.cycles, now_s);
            } else if constexpr (std::is_same_v<T, HomeCmd>) {
                return apply_home(state, cfg, now_s);
            } else if constexpr (std::is_same_v<T, StatusCmd>) {
                PumpReply reply;
                reply.ok = true;
                reply.line = fmt("OK STATUS %.1f %.1f %s", state.plunger_volume_ul,
                                 cfg.capacity_ul, state.busy(now_s) ? "busy" : "idle");
                return reply;
            } else {
                static_assert(std::is_same_v<T, RateCmd>);
                if (!(c.step_rate > 0.0) || !std::isfinite(c.step_rate)) {
                    return error_reply(PumpErrorCode::kParse, "invalid step rate");
                }
                cfg.step_rate = c.step_rate;
                PumpReply reply;
                reply.ok = true;
                reply.line = fmt("OK RATE %.1f", cfg.step_rate);
                return reply;
            }
        },
        cmd);
}

std::optional<PumpCommand> parse_pump_command(std::string_view line, std::string* parse_detail) {
    std::string detail;
    const auto fail = [&](std::string message) -> std::optional<PumpCommand> {
        if (parse_detail != nullptr) *parse_detail = std::move(message);
        return std::nullopt;
    };

    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    const auto tokens = split_ws(line);
    if (tokens.empty()) {
        return fail("empty command");
    }
    const std::string_view op = tokens[0];

    if (op == "DRAW" || op == "PUSH") {
        if (tokens.size() != 2) {
            return fail(std::string(op) + " takes exactly one volume argument");
        }
        double volume = 0.0;
        if (!parse_double(tokens[1], volume) || volume < 0.0) {
            return fail("invalid volume '" + std::string(tokens[1]) + "'");
        }
        if (op == "DRAW") return PumpCommand{DrawCmd{volume}};
        return PumpCommand{PushCmd{volume}};
    }
    if (op == "FLUSH") {
        if (tokens.size() != 2) {
            return fail("FLUSH takes exactly one count argument");
        }
        int cycles = 0;
        if (!parse_int(tokens[1], cycles) || cycles < 0) {
            return fail("invalid flush count '" + std::string(tokens[1]) + "'");
        }
        return PumpCommand{FlushCmd{cycles}};
    }
    if (op == "HOME" || op == "STATUS") {
        if (tokens.size() != 1) {
            return fail(std::string(op) + " takes no arguments");
        }
        if (op == "HOME") return PumpCommand{HomeCmd{}};
        return PumpCommand{StatusCmd{}};
    }
    if (op == "RATE") {
        if (tokens.size() != 2) {
            return fail("RATE takes exactly one argument");
        }
        double rate = 0.0;
        if (!parse_double(tokens[1], rate) || rate <= 0.0) {
            return fail("invalid step rate '" + std::string(tokens[1]) + "'");
        }
        return PumpCommand{RateCmd{rate}};
    }
    return fail("unknown command " + std::string(op));
}

std::optional<double> reply_duration(const std::string& reply_line) {
    const auto tokens = split_ws(reply_line);
    if (tokens.size() < 3 || tokens[0] != "OK") {
        return std::nullopt;
    }
    const std::string_view op = tokens[1];
    if (op != "DRAW" && op != "PUSH" && op != "FLUSH" && op != "HOME") {
        return std::nullopt;
    }
    double duration = 0.0;
    if (!parse_double(tokens.back(), duration)) {
        return std::nullopt;
    }
    return duration;
}

}  // namespace labseq
