#include "rhw/hazard.hpp"

#include <algorithm>
#include <cassert>

namespace rhw {

bool apply_staged_stop(World& world, const HazardPlan& plan, double step_length,
                       bool& fired) {
  if (!plan.enabled || fired || world.trigger_id < 0) return false;
  for (auto& lane : world.lanes) {
    for (auto& v : lane) {
      if (v.id != world.trigger_id) continue;
      if (v.crashed || v.position < plan.trigger_position) return false;
      v.acceleration = -v.speed / step_length;
      v.speed = 0.0;
      v.staged_stop = true;
      v.target_speed = 0.0;
      v.safety_speed = 0.0;
      fired = true;
      world.events.push_back({world.clock, EventKind::StagedStop, v.id, -1, v.lane,
                              v.position, ""});
      return true;
    }
  }
  return false;
}

std::vector<CrashEvent> detect_collisions(const World& world) {
  std::vector<CrashEvent> found;
  for (int lane = 0; lane < static_cast<int>(world.lanes.size()); ++lane) {
    const auto& q = world.lanes[lane];
    for (std::size_t i = 1; i < q.size(); ++i) {
      const VehicleState& leader = q[i - 1];
      const VehicleState& follower = q[i];
      if (follower.position < leader.rear()) continue;
      if (follower.crashed && leader.crashed) continue;
      found.push_back({world.clock, follower.id, leader.id, lane, follower.position});
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const CrashEvent& a, const CrashEvent& b) {
                     if (a.position != b.position) return a.position > b.position;
                     return a.follower < b.follower;
                   });
  return found;
}

void handle_crash(World& world, const CrashEvent& event) {
  auto freeze = [&](int id) {
    for (auto& lane : world.lanes) {
      for (auto& v : lane) {
        if (v.id != id) continue;
        v.crashed = true;
        v.speed = 0.0;
        v.target_speed = 0.0;
        v.safety_speed = 0.0;
        // Controls end with the crash.
        v.force_lc = false;
        v.scr_cap.reset();
        v.gap_control.reset();
        v.lane_entry_ban.reset();
        return;
      }
    }
    assert(false && "crash participant not on road");
  };
  freeze(event.follower);
  freeze(event.leader);
  world.crashes.push_back(event);
  world.events.push_back({event.time, EventKind::Crash, event.follower, event.leader,
                          event.lane, event.position, ""});
}

}  // namespace rhw
