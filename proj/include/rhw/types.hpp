#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rhw {

/// Thrown for invalid configuration or bad user input (CLI exit code 1).
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown for runtime failures such as unwritable output paths (CLI exit code 2).
class RunError : public std::runtime_error {
public:
  explicit RunError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RoadNetwork {
  double length = 5000.0;      // m
  int lane_count = 2;
  double speed_limit = 30.56;  // m/s (110 km/h)
  int hazard_lane = 0;         // lane the staged incident occurs on
};

// Headway-widening overlay pushed to vehicles via EEBL warnings.
struct GapControlParams {
  double target_time_headway = 4.0;   // s
  double target_space_headway = 2.0;  // m
  double duration = -1.0;             // s; -1 = keep until released
  double change_rate = 0.5;           // headway-seconds gained per second
  double max_decel = 1.5;             // m/s^2 cap for gap-opening braking
};

struct GapControlState {
  GapControlParams params;
  double start_time = 0.0;
  double base_tau = 0.0;
};

struct DriverParams {
  double sigma = 0.2;               // dawdling imperfection in [0,1]
  double tau = 2.0;                 // desired time headway, s
  double accel = 2.0;               // m/s^2
  double decel = 3.5;               // comfortable/planning deceleration, m/s^2
  double emergency_decel = 4.5;     // physical braking limit, m/s^2
  double max_speed = 30.5;          // m/s
  double speed_factor = 1.1;        // multiplier on the speed limit
  double action_step_length = 0.9;  // decision interval (reaction time), s
  double lc_assertive = 1.3;        // gap-acceptance scaling for lane changes
};

enum class Zone { Standard, Safe, Dangerous, NearCrash };

const char* zone_name(Zone z);

struct VehicleState {
  int id = 0;
  int lane = 0;
  double position = 0.0;      // front bumper, m from upstream end
  double speed = 0.0;         // m/s
  double acceleration = 0.0;  // last applied, m/s^2
  double length = 5.0;        // m
  double min_gap = 2.5;       // standstill spacing kept in car following, m
  bool equipped = false;      // can receive V2I messages
  bool crashed = false;
  bool staged_stop = false;   // scripted abrupt stop has fired
  bool is_trigger = false;    // the vehicle staged to cause the incident
  Zone zone = Zone::Standard;
  DriverParams driver;

  // TCS-imposed controls
  std::optional<GapControlState> gap_control;
  std::optional<double> scr_cap;          // desired-speed cap, m/s
  bool force_lc = false;                  // escape the hazard lane
  std::optional<int> lane_entry_ban;

  // Driving state held between decisions
  long next_decision_tick = 0;
  double target_speed = 0.0;   // last planned speed
  double safety_speed = 0.0;   // base-headway car-following requirement
  double voluntary_decel_cap = 4.5;  // braking rate for non-safety slowdowns

  double rear() const { return position - length; }
};

struct HazardPlan {
  bool enabled = true;
  double trigger_position = 4000.0;  // m
  double depart_time = 300.0;        // s
  double speed_factor = 1.1;         // trigger vehicle's desired-speed factor
};

struct CrashEvent {
  double time = 0.0;
  int follower = 0;
  int leader = 0;
  int lane = 0;
  double position = 0.0;  // follower front bumper at detection
};

enum class EventKind {
  Insert,
  Exit,
  LaneChange,
  Crash,
  StagedStop,
  HazardDetected,
  Message,
  Release,
  Warning,
};

const char* event_kind_name(EventKind k);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Insert;
  int vehicle = -1;
  int other = -1;
  int lane = -1;
  double position = 0.0;
  std::string detail;
};

}  // namespace rhw
