#include "rhw/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

#include "rhw/csv.hpp"
#include "rhw/driver.hpp"
#include "rhw/hazard.hpp"
#include "rhw/lane_change.hpp"

namespace rhw {

Simulation::Simulation(const SimConfig& cfg, std::ostream* trajectory)
    : cfg_(cfg),
      world_(init_world(cfg)),
      tcs_(cfg.tcs, cfg.road.speed_limit, cfg.step_length,
           cfg.output.log_all_messages),
      ssm_(cfg.ssm, cfg.road, cfg.horizon),
      dawdle_(make_stream(cfg.seed, RngStream::Dawdle)),
      trajectory_(trajectory),
      n_ticks_(std::lround(cfg.horizon / cfg.step_length)) {
  if (trajectory_ != nullptr) write_trajectory_header(*trajectory_);
}

void Simulation::decide_vehicle(int lane, std::size_t idx) {
  auto& v = world_.lanes[lane][idx];
  const long decision_ticks = std::max<long>(
      1, std::lround(v.driver.action_step_length / cfg_.step_length));
  const double action_step = static_cast<double>(decision_ticks) * cfg_.step_length;

  // Lane change first; the staged vehicle holds its lane by design.
  int current_lane = lane;
  std::size_t current_idx = idx;
  if (!v.is_trigger) {
    const LaneChangeDecision d = evaluate_lane_change(world_, v, cfg_);
    if (d.target_lane >= 0 && safety_check(world_, v, d.target_lane)) {
      const double pos = v.position;
      execute_lane_change(world_, lane, idx, d.target_lane, d.reason);
      current_lane = d.target_lane;
      const auto& dst = world_.lanes[current_lane];
      const auto it = std::lower_bound(
          dst.begin(), dst.end(), pos,
          [](const VehicleState& a, double p) { return a.position > p; });
      current_idx = static_cast<std::size_t>(it - dst.begin());
      assert(current_idx < dst.size() && dst[current_idx].position == pos);
    }
  }

  auto& veh = world_.lanes[current_lane][current_idx];
  const VehicleState* leader = leader_of(world_, current_lane, current_idx);
  PlanContext ctx;
  ctx.speed_limit = cfg_.road.speed_limit;
  ctx.now = world_.clock;
  ctx.action_step = action_step;
  const double u = dawdle_.uniform01();
  veh.target_speed = plan_speed(veh, leader, ctx, u);
  veh.safety_speed = safety_requirement(veh, leader, ctx);
  const GapControlEffect gc = update_gap_control(
      veh.gap_control ? &*veh.gap_control : nullptr, world_.clock, veh.driver);
  veh.voluntary_decel_cap = gc.active ? gc.decel_cap : veh.driver.emergency_decel;
  veh.next_decision_tick = world_.tick + decision_ticks;
}

void Simulation::decide_all() {
  // Global downstream-to-upstream order across lanes, so that competing
  // lane changes resolve deterministically with the upstream vehicle
  // yielding. A vehicle that changes lane keeps its decision slot.
  const int lane_count = static_cast<int>(world_.lanes.size());
  std::vector<std::size_t> cursor(static_cast<std::size_t>(lane_count), 0);
  while (true) {
    int best_lane = -1;
    double best_pos = 0.0;
    for (int l = 0; l < lane_count; ++l) {
      const auto& q = world_.lanes[l];
      if (cursor[l] >= q.size()) continue;
      const double pos = q[cursor[l]].position;
      if (best_lane < 0 || pos > best_pos) {
        best_lane = l;
        best_pos = pos;
      }
    }
    if (best_lane < 0) break;
    auto& v = world_.lanes[best_lane][cursor[best_lane]];
    if (v.crashed || v.staged_stop || v.next_decision_tick > world_.tick) {
      ++cursor[best_lane];
      continue;
    }
    const std::size_t before = world_.lanes[best_lane].size();
    decide_vehicle(best_lane, cursor[best_lane]);
    // On a lane change the source slot now holds the next vehicle.
    if (world_.lanes[best_lane].size() == before) ++cursor[best_lane];
  }
}

void Simulation::step() {
  assert(world_.tick < n_ticks_);

  insert_vehicles(world_, cfg_);
  tcs_.cycle(world_);
  decide_all();

  for (auto& lane : world_.lanes) {
    for (auto& v : lane) integrate(v, v.target_speed, cfg_.step_length);
  }

  apply_staged_stop(world_, cfg_.hazard, cfg_.step_length, staged_fired_);

  for (const CrashEvent& e : detect_collisions(world_)) handle_crash(world_, e);

  handle_exits(world_, cfg_);
  if (!staged_fired_ && !trigger_warned_ && cfg_.hazard.enabled &&
      world_.trigger_id >= 0 &&
      world_.next_arrival >= world_.schedule.size() &&
      !world_.is_on_road(world_.trigger_id) && world_.queued() == 0) {
    // The staged vehicle left the road without reaching its mark.
    world_.events.push_back({world_.clock, EventKind::Warning, world_.trigger_id, -1,
                             cfg_.road.hazard_lane, 0.0, "trigger_exited"});
    trigger_warned_ = true;
  }

  log_tick();

  ++world_.tick;
  world_.clock = static_cast<double>(world_.tick) * cfg_.step_length;

  assert(world_.inserted == world_.exited + world_.on_road());
}

void Simulation::log_tick() {
  ssm_.on_tick(world_);
  if (trajectory_ != nullptr) {
    for (const auto& lane : world_.lanes) {
      for (const auto& v : lane) write_trajectory_row(*trajectory_, world_.clock, v);
    }
  }
}

RunResult Simulation::finish() {
  RunResult r;
  r.report = ssm_.finish(world_, cfg_.horizon);
  if (r.report.first_crash_time &&
      *r.report.first_crash_time + cfg_.ssm.tit_window > cfg_.horizon + 1e-9) {
    world_.events.push_back({cfg_.horizon, EventKind::Warning, -1, -1, -1, 0.0,
                             "tit_window_truncated"});
  }
  r.inserted = world_.inserted;
  r.exited = world_.exited;
  r.events = std::move(world_.events);
  r.crashes = std::move(world_.crashes);
  r.horizon = cfg_.horizon;
  r.step_length = cfg_.step_length;
  return r;
}

RunResult Simulation::run(const SimConfig& cfg, std::ostream* trajectory) {
  Simulation sim(cfg, trajectory);
  while (!sim.done()) sim.step();
  return sim.finish();
}

}  // namespace rhw
