#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rhw/config.hpp"
#include "rhw/types.hpp"

namespace rhw {

struct World;

/// One follower-leader observation feeding the safety measures.
struct ConflictSample {
  double time = 0.0;
  int follower = 0;
  int leader = 0;
  double d_lf = 0.0;  // leader rear bumper to follower front bumper, m
  double v_f = 0.0;
  double v_l = 0.0;
  int lane = 0;
};

/// Round to the 1e-6 grid used by the emitted CSV files, so metrics
/// computed in-run and metrics recomputed from a trajectory file agree
/// bit for bit.
inline double quantize6(double x) { return std::nearbyint(x * 1e6) / 1e6; }

/// Leader-rear to follower-front distance, shared by the in-run sampler
/// and the trajectory recomputation.
inline double pair_distance(double leader_pos, double leader_len,
                            double follower_pos) {
  return leader_pos - leader_len - follower_pos;
}

/// Window membership for the integrated-TTC sum; the epsilon keeps tick
/// boundaries stable against representation noise.
inline bool in_tit_window(double t, double anchor, double window) {
  return t - anchor >= -1e-6 && t - anchor < window - 1e-6;
}

/// Time to collision; defined only when the follower is faster and the
/// pair has not already collided (d_lf >= 0).
std::optional<double> ttc(const ConflictSample& s);

/// Deceleration rate required of the follower to avoid the collision;
/// zero when not closing, infinity when overlapping at closing speed.
double drac(const ConflictSample& s);

/// Rectangle-rule time-integrated TTC over [anchor, anchor + window):
/// sum of max(ttc_star - TTC, 0) x dt over samples with a defined TTC.
double tit(const std::vector<ConflictSample>& samples, const SsmConfig& cfg,
           double anchor);

/// Counts follower episodes (maximal runs of consecutive ticks) beyond
/// each criticality threshold: TTC < ttc_star, DRAC > drac_star.
std::pair<long, long> count_critical(const std::vector<ConflictSample>& samples,
                                     const SsmConfig& cfg);

/// Incremental episode counter: one episode per maximal run of
/// consecutive critical ticks per follower.
class EpisodeCounter {
public:
  void observe(int follower, long tick, bool critical) {
    if (!critical) return;
    auto [it, fresh] = last_.try_emplace(follower, tick);
    if (fresh || tick > it->second + 1) ++count_;
    it->second = tick;
  }
  long count() const { return count_; }

private:
  std::unordered_map<int, long> last_;
  long count_ = 0;
};

struct SpeedCell {
  double speed_sum = 0.0;
  long count = 0;
  double mean() const { return count > 0 ? speed_sum / count : 0.0; }
};

/// Mean-speed grid over time x space bins; empty cells have count 0 and
/// are treated as absent, not as zero speed.
struct SpaceTimeField {
  double dt_bin = 60.0, dx_bin = 100.0;
  long t_bins = 0, x_bins = 0;
  std::vector<SpeedCell> cells;  // t-major

  SpeedCell& at(long t, long x) { return cells[static_cast<std::size_t>(t * x_bins + x)]; }
  const SpeedCell& at(long t, long x) const {
    return cells[static_cast<std::size_t>(t * x_bins + x)];
  }
};

struct SsmReport {
  double tit = 0.0;
  long crash_count = 0;
  double flow = 0.0;  // veh/h over the horizon
  long critical_ttc_events = 0;
  long critical_drac_events = 0;
  double min_ttc = std::numeric_limits<double>::infinity();
  std::optional<double> first_crash_time;
  std::vector<double> min_ttc_series;   // per tick, NaN when undefined
  std::vector<double> max_drac_series;  // per tick, NaN when no samples
  std::vector<SpeedCell> mean_speed_series;      // per dt_bin
  std::vector<SpaceTimeField> space_time_lanes;  // one field per lane

  /// All-lane aggregate of the space-time speed field.
  SpaceTimeField space_time_total() const;
};

/// Streaming in-run evaluator: samples every follower at every tick from
/// the end-of-tick world state (values quantized exactly as the trajectory
/// CSV rows are) and folds them into the report.
class SsmCollector {
public:
  SsmCollector(const SsmConfig& cfg, const RoadNetwork& road, double horizon);

  void on_tick(const World& world);
  SsmReport finish(const World& world, double horizon);

private:
  void add_sample(const ConflictSample& s, long tick);

  SsmConfig cfg_;
  long n_ticks_;
  std::optional<double> anchor_;
  std::vector<ConflictSample> window_samples_;
  EpisodeCounter ttc_episodes_;
  EpisodeCounter drac_episodes_;
  double min_ttc_ = std::numeric_limits<double>::infinity();
  std::vector<double> min_ttc_series_;
  std::vector<double> max_drac_series_;
  std::vector<SpeedCell> mean_speed_series_;
  std::vector<SpaceTimeField> space_time_;
};

}  // namespace rhw
