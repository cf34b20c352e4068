#include "rhw/lane_change.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "rhw/driver.hpp"

namespace rhw {

namespace {

// First vehicle ahead of `position` in `lane` (smallest position > ours),
// and the first behind. Deques are position-descending.
std::pair<const VehicleState*, const VehicleState*> neighbors_in_lane(
    const World& world, int lane, double position) {
  const auto& q = world.lanes[lane];
  auto it = std::lower_bound(
      q.begin(), q.end(), position,
      [](const VehicleState& v, double pos) { return v.position > pos; });
  const VehicleState* lead = it == q.begin() ? nullptr : &*(it - 1);
  const VehicleState* follow = it == q.end() ? nullptr : &*it;
  return {lead, follow};
}

double anticipated_speed(const VehicleState& v, const VehicleState* leader,
                         const World& world, const SimConfig& cfg) {
  PlanContext ctx;
  ctx.speed_limit = cfg.road.speed_limit;
  ctx.now = world.clock;
  ctx.action_step = v.driver.action_step_length;
  return plan_speed_deterministic(v, leader, ctx);
}

bool banned(const VehicleState& v, int lane) {
  return v.lane_entry_ban && *v.lane_entry_ban == lane;
}

}  // namespace

LaneChangeDecision evaluate_lane_change(const World& world,
                                        const VehicleState& vehicle,
                                        const SimConfig& cfg) {
  LaneChangeDecision d;
  std::vector<int> adjacent;
  if (vehicle.lane > 0) adjacent.push_back(vehicle.lane - 1);
  if (vehicle.lane + 1 < cfg.road.lane_count) adjacent.push_back(vehicle.lane + 1);

  const bool forced = vehicle.force_lc && vehicle.lane == cfg.road.hazard_lane;
  double best_gain = forced ? -1e18 : cfg.drivers.speed_gain_threshold;
  const VehicleState* own_leader =
      neighbors_in_lane(world, vehicle.lane, vehicle.position).first;
  const double here = anticipated_speed(vehicle, own_leader, world, cfg);

  for (int lane : adjacent) {
    if (banned(vehicle, lane)) continue;
    auto [lead, follow] = neighbors_in_lane(world, lane, vehicle.position);
    (void)follow;
    const double there = anticipated_speed(vehicle, lead, world, cfg);
    const double gain = there - here;
    if (forced || gain > best_gain) {
      d.target_lane = lane;
      d.reason = forced ? LcReason::ForcedHazardEscape : LcReason::SpeedGain;
      best_gain = gain;
      if (forced) break;  // first non-banned adjacent lane
    }
  }
  return d;
}

bool safety_check(const World& world, const VehicleState& vehicle, int target_lane) {
  if (target_lane < 0 || target_lane >= static_cast<int>(world.lanes.size())) {
    throw ValidationError("safety_check: nonexistent lane " +
                          std::to_string(target_lane));
  }
  auto [lead, follow] = neighbors_in_lane(world, target_lane, vehicle.position);
  const double assertive = vehicle.driver.lc_assertive;
  if (lead != nullptr) {
    const double gap = lead->rear() - vehicle.position;
    const double needed =
        (vehicle.min_gap + vehicle.speed * vehicle.driver.tau) / assertive;
    if (gap < 0.0 || gap < needed) return false;
  }
  if (follow != nullptr) {
    const double gap = vehicle.rear() - follow->position;
    const double needed =
        (follow->min_gap + follow->speed * follow->driver.tau) / assertive;
    if (gap < 0.0 || gap < needed) return false;
  }
  return true;
}

void execute_lane_change(World& world, int from_lane, std::size_t idx,
                         int target_lane, LcReason reason) {
  VehicleState v = world.lanes[from_lane][idx];
  auto& src = world.lanes[from_lane];
  src.erase(src.begin() + static_cast<std::ptrdiff_t>(idx));
  auto& dst = world.lanes[target_lane];
  auto it = std::lower_bound(
      dst.begin(), dst.end(), v.position,
      [](const VehicleState& a, double pos) { return a.position > pos; });
  v.lane = target_lane;
  it = dst.insert(it, v);
  // safety_check guarantees the relocation cannot create bumper overlap
  assert(it == dst.begin() || (it - 1)->rear() >= it->position);
  assert(it + 1 == dst.end() || it->rear() >= (it + 1)->position);
  world.events.push_back(
      {world.clock, EventKind::LaneChange, v.id, -1, target_lane, v.position,
       std::string("from=") + std::to_string(from_lane) + ";reason=" +
           (reason == LcReason::ForcedHazardEscape ? "forced_hazard_escape"
                                                   : "speed_gain")});
}

}  // namespace rhw
