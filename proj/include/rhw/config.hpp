#pragma once

#include <cstdint>
#include <string>

#include "rhw/rng.hpp"
#include "rhw/types.hpp"

namespace rhw {

/// A scalar driver parameter: either a constant or a clipped normal.
struct DistSpec {
  bool is_normal = false;
  double value = 0.0;  // constant
  double mean = 0.0, stddev = 0.0, min = 0.0, max = 0.0;

  static DistSpec constant(double v) {
    DistSpec d;
    d.value = v;
    return d;
  }
  static DistSpec normal(double mean, double stddev, double min, double max) {
    DistSpec d;
    d.is_normal = true;
    d.mean = mean;
    d.stddev = stddev;
    d.min = min;
    d.max = max;
    return d;
  }
  bool operator==(const DistSpec&) const = default;
};

/// Population heterogeneity of the driver model.
struct DriverDistributions {
  DistSpec sigma = DistSpec::normal(0.2, 0.5, 0.0, 1.0);
  DistSpec decel = DistSpec::normal(3.5, 1.0, 2.0, 4.5);
  DistSpec accel = DistSpec::normal(2.0, 1.0, 1.0, 3.5);
  DistSpec speed_factor = DistSpec::normal(1.1, 0.2, 0.8, 1.2);
  double tau = 2.0;
  double emergency_decel = 4.5;
  double lc_assertive = 1.3;
  double action_step_length = 0.9;
  double max_speed = 30.5;
  // Vehicle geometry and the lane-change gain rule.
  double veh_length = 5.0;
  double min_gap = 2.5;
  double speed_gain_threshold = 1.0;  // m/s advantage needed to change lane
  bool operator==(const DriverDistributions&) const = default;
};

enum class EeblFormula { Adopted, Literal };

/// Traffic Control Server parameters.
struct TcsConfig {
  double rhw_range = 500.0;          // m upstream of the hazard
  double reaction_time = 0.9;        // s, warned-driver reaction time
  double safety_factor = 2.0;
  double decel_ability = 4.5;        // m/s^2 assumed braking ability
  double scr_factor = 1.0;           // desired-speed fraction sent via SCR
  double decel_alarm_threshold = 4.5;  // m/s^2 sustained deceleration
  double alarm_window = 0.9;         // s window for the deceleration alarm
  int cam_silence_ticks = 3;         // missing CAMs before a silence alarm
  bool ground_truth_detection = true;  // registered collisions latch the hazard
  EeblFormula eebl_formula = EeblFormula::Adopted;
  GapControlParams gap_control;      // payload template for EEBL warnings
  bool operator==(const TcsConfig&) const = default;
};

/// Safety-measure evaluation parameters.
struct SsmConfig {
  double ttc_star = 1.5;        // s, critical time-to-collision
  double drac_star = 3.35;      // m/s^2, critical required deceleration
  double tit_window = 15.0;     // s integrated after the first crash
  double dt = 0.1;              // s, sampling interval
  double conflict_range = 250.0;  // m, pairs farther apart are not sampled
  double dt_bin = 60.0;         // s, time bin of the space-time speed field
  double dx_bin = 100.0;        // m, space bin of the space-time speed field
  bool operator==(const SsmConfig&) const = default;
};

struct OutputConfig {
  bool trajectory = false;        // per-tick vehicle rows (large)
  bool log_all_messages = false;  // every delivery instead of state changes
  bool operator==(const OutputConfig&) const = default;
};

struct SimConfig {
  RoadNetwork road;
  double step_length = 0.1;   // s
  double horizon = 3600.0;    // s
  double demand = 3000.0;     // veh/h
  double penetration = 0.0;   // fraction of equipped vehicles
  bool exact_quota = false;   // equip exactly round(penetration x N) vehicles
  std::uint64_t seed = 1;
  DriverDistributions drivers;
  TcsConfig tcs;
  HazardPlan hazard;
  SsmConfig ssm;
  OutputConfig output;
};

bool operator==(const RoadNetwork& a, const RoadNetwork& b);
bool operator==(const HazardPlan& a, const HazardPlan& b);
bool operator==(const GapControlParams& a, const GapControlParams& b);
bool operator==(const SimConfig& a, const SimConfig& b);

/// Throws ValidationError naming the offending key when any invariant fails.
void validate(const SimConfig& cfg);

/// Parse the line-oriented config format ([section], key = value, #
/// comments). Unknown keys, duplicate keys and type mismatches are errors.
SimConfig parse_config_text(const std::string& text);
SimConfig parse_config(const std::string& path);

/// Canonical text form; parse(serialize(cfg)) == cfg.
std::string serialize_config(const SimConfig& cfg);

/// Draw one driver from the population. Clipped normals use rejection
/// sampling; a degenerate spec that rejects 10^6 draws is an error.
DriverParams sample_driver(const DriverDistributions& dist, Rng& rng);

/// Fixed parameters of the staged trigger vehicle (no dawdling so the
/// incident time is predictable; preference factor from the hazard plan).
DriverParams trigger_driver(const DriverDistributions& dist, const HazardPlan& plan);

}  // namespace rhw
