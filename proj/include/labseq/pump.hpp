#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace labseq {

/// Stepper, lead screw and syringe geometry plus drive speed.
///
/// Defaults model a 0.9 degree bipolar stepper at 1/16 microstep driving a
/// 2 mm/rev lead screw over a 60 mm stroke into a 100 uL glass syringe, with
/// the step rate calibrated so a 10 uL draw takes 1.000 s.
struct PumpConfig {
    double step_angle_deg = 0.9;          // full-step angle
    int microstep_divisor = 16;           // 1, 2, 4, 8, 16 or 32
    double lead_pitch_mm = 2.0;           // plunger travel per revolution
    double stroke_length_mm = 60.0;       // usable plunger travel
    double capacity_ul = 100.0;           // syringe volume over the full stroke
    double step_rate = 19200.0;           // microsteps per second

    bool operator==(const PumpConfig&) const = default;
};

void validate(const PumpConfig& cfg);

double steps_per_revolution(const PumpConfig& cfg);
double microsteps_per_microliter(const PumpConfig& cfg);

/// Nearest microstep count for a volume (ties to even).
/// Throws CapacityError when volume exceeds the syringe capacity.
std::int64_t volume_to_microsteps(const PumpConfig& cfg, double volume_ul);
double microsteps_to_volume(const PumpConfig& cfg, std::int64_t microsteps);

/// Time to move a volume at the configured step rate, seconds.
double transfer_duration(const PumpConfig& cfg, double volume_ul);

/// A requested volume does not fit the syringe.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Wire protocol (UTF-8 lines, "\n" terminated, one reply per request):
//
//   request                reply
//   -------                -----
//   DRAW <uL>              OK DRAW <uL %.1f> <duration_s %.3f>
//   PUSH <uL>              OK PUSH <uL %.1f> <duration_s %.3f>
//   FLUSH <count>          OK FLUSH <count> <duration_s %.3f>
//   HOME                   OK HOME <duration_s %.3f>
//   STATUS                 OK STATUS <plunger_uL %.1f> <capacity_uL %.1f> <idle|busy>
//   RATE <usteps/s>        OK RATE <usteps/s %.1f>
//
//   errors                 ERR <OVERFLOW|UNDERFLOW|BUSY|PARSE> <message>
// ---------------------------------------------------------------------------

struct DrawCmd {
    double volume_ul = 0.0;
};
struct PushCmd {
    double volume_ul = 0.0;
};
struct FlushCmd {
    int cycles = 0;
};
struct HomeCmd {};
struct StatusCmd {};
struct RateCmd {
    double step_rate = 0.0;
};

using PumpCommand = std::variant<DrawCmd, PushCmd, FlushCmd, HomeCmd, StatusCmd, RateCmd>;

enum class PumpErrorCode { kOverflow, kUnderflow, kBusy, kParse };

const char* to_string(PumpErrorCode code);

/// Live plunger state. The pump is busy until the motion started by the last
/// command finishes on the device clock; StatusCmd is the only command it
/// accepts while busy.
struct PumpState {
    double plunger_volume_ul = 0.0;
    double busy_until_s = 0.0;

    bool busy(double now_s) const { return now_s < busy_until_s; }
};

struct PumpReply {
    bool ok = false;
    std::string line;                     // full reply line, no terminator
    double duration_s = 0.0;              // simulated motion time, 0 for STATUS/RATE
    std::optional<PumpErrorCode> error;
};

/// Applies one command at device time `now_s`. State and config are left
/// untouched whenever the reply is an error.
PumpReply apply_command(PumpState& state, PumpConfig& cfg, const PumpCommand& cmd, double now_s);

/// Parses one request line (without terminator). On failure returns nullopt
/// and fills `parse_detail` with the message used in the ERR PARSE reply.
std::optional<PumpCommand> parse_pump_command(std::string_view line, std::string* parse_detail);

/// Duration carried by an OK reply to DRAW/PUSH/FLUSH/HOME; nullopt for
/// error replies and for replies without a duration field.
std::optional<double> reply_duration(const std::string& reply_line);

}  // namespace labseq
