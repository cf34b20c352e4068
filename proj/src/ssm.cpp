#include "rhw/ssm.hpp"

#include <algorithm>
#include <limits>

#include "rhw/world.hpp"

namespace rhw {

std::optional<double> ttc(const ConflictSample& s) {
  if (s.d_lf < 0.0) return std::nullopt;  // crash in progress
  if (s.v_f <= s.v_l) return std::nullopt;
  return s.d_lf / (s.v_f - s.v_l);
}

double drac(const ConflictSample& s) {
  if (s.v_f <= s.v_l) return 0.0;
  if (s.d_lf <= 0.0) return std::numeric_limits<double>::infinity();
  const double dv = s.v_f - s.v_l;
  return dv * dv / (2.0 * s.d_lf);
}

double tit(const std::vector<ConflictSample>& samples, const SsmConfig& cfg,
           double anchor) {
  double sum = 0.0;
  for (const auto& s : samples) {
    if (!in_tit_window(s.time, anchor, cfg.tit_window)) continue;
    const auto t = ttc(s);
    if (!t || *t > cfg.ttc_star) continue;
    sum += (cfg.ttc_star - *t) * cfg.dt;
  }
  return sum;
}

std::pair<long, long> count_critical(const std::vector<ConflictSample>& samples,
                                     const SsmConfig& cfg) {
  EpisodeCounter ttc_ep, drac_ep;
  for (const auto& s : samples) {
    const long tick = std::lround(s.time / cfg.dt);
    const auto t = ttc(s);
    ttc_ep.observe(s.follower, tick, t.has_value() && *t < cfg.ttc_star);
    drac_ep.observe(s.follower, tick, drac(s) > cfg.drac_star);
  }
  return {ttc_ep.count(), drac_ep.count()};
}

SpaceTimeField SsmReport::space_time_total() const {
  SpaceTimeField total;
  if (space_time_lanes.empty()) return total;
  total = space_time_lanes.front();
  for (std::size_t l = 1; l < space_time_lanes.size(); ++l) {
    const auto& f = space_time_lanes[l];
    for (std::size_t i = 0; i < total.cells.size(); ++i) {
      total.cells[i].speed_sum += f.cells[i].speed_sum;
      total.cells[i].count += f.cells[i].count;
    }
  }
  return total;
}

SsmCollector::SsmCollector(const SsmConfig& cfg, const RoadNetwork& road,
                           double horizon)
    : cfg_(cfg), n_ticks_(std::lround(horizon / cfg.dt)) {
  min_ttc_series_.assign(static_cast<std::size_t>(n_ticks_),
                         std::numeric_limits<double>::quiet_NaN());
  max_drac_series_.assign(static_cast<std::size_t>(n_ticks_),
                          std::numeric_limits<double>::quiet_NaN());
  const long t_bins = static_cast<long>(std::ceil(horizon / cfg.dt_bin - 1e-9));
  const long x_bins = static_cast<long>(std::ceil(road.length / cfg.dx_bin - 1e-9));
  mean_speed_series_.assign(static_cast<std::size_t>(t_bins), SpeedCell{});
  space_time_.resize(static_cast<std::size_t>(road.lane_count));
  for (auto& field : space_time_) {
    field.dt_bin = cfg.dt_bin;
    field.dx_bin = cfg.dx_bin;
    field.t_bins = t_bins;
    field.x_bins = x_bins;
    field.cells.assign(static_cast<std::size_t>(t_bins * x_bins), SpeedCell{});
  }
}

void SsmCollector::add_sample(const ConflictSample& s, long tick) {
  const auto t = ttc(s);
  const double d = drac(s);
  if (t) {
    min_ttc_ = std::min(min_ttc_, *t);
    auto& cell = min_ttc_series_[static_cast<std::size_t>(tick)];
    if (std::isnan(cell) || *t < cell) cell = *t;
  }
  auto& dcell = max_drac_series_[static_cast<std::size_t>(tick)];
  if (std::isnan(dcell) || d > dcell) dcell = d;
  ttc_episodes_.observe(s.follower, tick, t.has_value() && *t < cfg_.ttc_star);
  drac_episodes_.observe(s.follower, tick, d > cfg_.drac_star);
  if (anchor_ && in_tit_window(s.time, *anchor_, cfg_.tit_window)) {
    window_samples_.push_back(s);
  }
}

void SsmCollector::on_tick(const World& world) {
  if (!anchor_ && !world.crashes.empty()) {
    anchor_ = quantize6(world.crashes.front().time);
  }
  const long tick = world.tick;
  if (tick >= n_ticks_) return;
  const double t_q = quantize6(world.clock);
  const long t_bin = std::min<long>(
      static_cast<long>(world.clock / cfg_.dt_bin), space_time_.empty()
                                                        ? 0
                                                        : space_time_[0].t_bins - 1);
  for (int lane = 0; lane < static_cast<int>(world.lanes.size()); ++lane) {
    const auto& q = world.lanes[lane];
    auto& field = space_time_[static_cast<std::size_t>(lane)];
    for (std::size_t i = 0; i < q.size(); ++i) {
      const VehicleState& v = q[i];
      // Traffic statistics (raw values).
      mean_speed_series_[static_cast<std::size_t>(t_bin)].speed_sum += v.speed;
      mean_speed_series_[static_cast<std::size_t>(t_bin)].count += 1;
      const long x_bin = std::min<long>(
          std::max<long>(0, static_cast<long>(v.position / cfg_.dx_bin)),
          field.x_bins - 1);
      auto& cell = field.at(t_bin, x_bin);
      cell.speed_sum += v.speed;
      cell.count += 1;
      // Conflict sample against the immediate leader (quantized values).
      if (i == 0) continue;
      const VehicleState& leader = q[i - 1];
      const double d_lf = pair_distance(quantize6(leader.position), leader.length,
                                        quantize6(v.position));
      if (d_lf > cfg_.conflict_range) continue;
      ConflictSample s;
      s.time = t_q;
      s.follower = v.id;
      s.leader = leader.id;
      s.d_lf = d_lf;
      s.v_f = quantize6(v.speed);
      s.v_l = quantize6(leader.speed);
      s.lane = lane;
      add_sample(s, tick);
    }
  }
}

SsmReport SsmCollector::finish(const World& world, double horizon) {
  SsmReport r;
  r.crash_count = static_cast<long>(world.crashes.size());
  r.flow = static_cast<double>(world.exited) * 3600.0 / horizon;
  r.critical_ttc_events = ttc_episodes_.count();
  r.critical_drac_events = drac_episodes_.count();
  r.min_ttc = min_ttc_;
  r.first_crash_time = anchor_;
  r.tit = anchor_ ? tit(window_samples_, cfg_, *anchor_) : 0.0;
  r.min_ttc_series = std::move(min_ttc_series_);
  r.max_drac_series = std::move(max_drac_series_);
  r.mean_speed_series = std::move(mean_speed_series_);
  r.space_time_lanes = std::move(space_time_);
  return r;
}

}  // namespace rhw
