#pragma once

#include <iosfwd>

#include "rhw/config.hpp"
#include "rhw/ssm.hpp"
#include "rhw/tcs.hpp"
#include "rhw/world.hpp"

namespace rhw {

struct RunResult {
  SsmReport report;
  long inserted = 0;
  long exited = 0;
  std::vector<Event> events;
  std::vector<CrashEvent> crashes;
  double horizon = 0.0;
  double step_length = 0.0;
};

/// One simulated run. Each tick executes, in order: insertion, the TCS
/// cycle, per-vehicle decisions (lane change then speed planning, at the
/// driver's action-step cadence), longitudinal integration, the staged
/// stop, collision detection/handling, exits and logging.
class Simulation {
public:
  /// `trajectory` may be null; when set, per-tick vehicle rows are
  /// streamed to it (CSV, header included).
  explicit Simulation(const SimConfig& cfg, std::ostream* trajectory = nullptr);

  void step();
  bool done() const { return world_.tick >= n_ticks_; }
  RunResult finish();

  const World& world() const { return world_; }
  World& mutable_world() { return world_; }
  const TrafficControlServer& tcs() const { return tcs_; }

  /// Convenience: run to the horizon and package the result.
  static RunResult run(const SimConfig& cfg, std::ostream* trajectory = nullptr);

private:
  void decide_all();
  void decide_vehicle(int lane, std::size_t idx);
  void log_tick();

  SimConfig cfg_;
  World world_;
  TrafficControlServer tcs_;
  SsmCollector ssm_;
  Rng dawdle_;
  std::ostream* trajectory_;
  long n_ticks_ = 0;
  bool staged_fired_ = false;
  bool trigger_warned_ = false;
};

}  // namespace rhw
