#pragma once

#include <vector>

#include "rhw/csv.hpp"

namespace rhw {

struct ScenarioSpec {
  int scenario_id = 1;
  double penetration = 0.0;
  double scr_factor = 1.0;  // unused at zero penetration
};

/// The 17-scenario grid: one zero-penetration baseline plus the cross
/// product of 4 penetration rates x 4 speed-change fractions.
std::vector<ScenarioSpec> table4_grid();

struct SweepResult {
  std::vector<SummaryRow> runs;   // one per (scenario, seed)
  std::vector<SummaryRow> means;  // one per scenario, seed = -1
};

SimConfig apply_scenario(const SimConfig& base, const ScenarioSpec& spec,
                         std::uint64_t seed);

/// Runs every (scenario, seed) pair. Pairs execute concurrently on up to
/// `threads` workers (0 = hardware concurrency); the aggregation is
/// position-stable, so summaries are identical regardless of scheduling.
/// A failing run is recorded in its row and the sweep continues.
SweepResult run_sweep(const SimConfig& base, const std::vector<ScenarioSpec>& specs,
                      const std::vector<std::uint64_t>& seeds, int threads = 0);

/// Writes summary.csv (per-run rows) and summary_means.csv into `dir`.
void write_sweep_outputs(const SweepResult& result, const std::string& dir);

}  // namespace rhw
