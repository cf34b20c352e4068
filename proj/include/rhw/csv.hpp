#pragma once

#include <iosfwd>
#include <string>

#include "rhw/sim.hpp"
#include "rhw/ssm.hpp"

namespace rhw {

/// Fixed 6-decimal formatting of the 1e-6-quantized value; every numeric
/// CSV field goes through this so files parse back to the exact doubles
/// the in-run metrics saw.
std::string fmt6(double x);

void write_trajectory_header(std::ostream& os);
void write_trajectory_row(std::ostream& os, double time, const VehicleState& v);

void write_events_csv(std::ostream& os, const std::vector<Event>& events);

struct SummaryRow {
  int scenario_id = 0;
  double penetration = 0.0;
  double scr_factor = 1.0;
  long seed = 0;  // -1 marks a per-scenario mean row
  double tit = 0.0;
  double crashes = 0.0;
  double flow_vph = 0.0;
  double min_ttc = -1.0;  // -1 when no TTC was ever defined
  double ttc_events = 0.0;
  double drac_events = 0.0;
  bool failed = false;
};

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

void write_spacetime_csv(std::ostream& os, const SpaceTimeField& field);

/// Writes events.csv, summary.csv and spacetime.csv into `dir` (created if
/// missing). Trajectory rows are streamed during the run, not here.
void emit_outputs(const RunResult& result, const SimConfig& cfg, int scenario_id,
                  const std::string& dir);

SummaryRow summary_of(const RunResult& result, const SimConfig& cfg, int scenario_id);

/// Safety metrics recomputed from a trajectory CSV — the independent path
/// used to cross-check the in-run collector.
struct TrajectoryMetrics {
  double tit = 0.0;
  double min_ttc = std::numeric_limits<double>::infinity();
  long ttc_events = 0;
  long drac_events = 0;
  long crash_count = 0;
  std::optional<double> first_crash_time;
  long rows = 0;
};

struct RecomputeOptions {
  SsmConfig ssm;
  double veh_length = 5.0;
  std::optional<double> crash_time;  // TIT anchor; auto-detected when absent
};

TrajectoryMetrics recompute_from_trajectory(const std::string& path,
                                            const RecomputeOptions& opt);

}  // namespace rhw
