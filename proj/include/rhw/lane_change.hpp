#pragma once

#include "rhw/world.hpp"

namespace rhw {

enum class LcReason { None, SpeedGain, ForcedHazardEscape };

struct LaneChangeDecision {
  int target_lane = -1;  // -1 = no change
  LcReason reason = LcReason::None;
  bool blocked_by_safety = false;
};

/// Lane-change intent at a decision tick. A forced hazard escape targets an
/// adjacent non-banned lane every decision until it succeeds; otherwise the
/// speed-gain rule applies. Banned lanes are never targeted.
LaneChangeDecision evaluate_lane_change(const World& world,
                                        const VehicleState& vehicle,
                                        const SimConfig& cfg);

/// Gap acceptance: the new follower's gap and the vehicle's own gap to the
/// new leader must each be at least the corresponding Krauss equilibrium
/// gap (min_gap + v x tau) divided by the changer's lc_assertive, with no
/// bumper overlap. Boundary equality is accepted.
bool safety_check(const World& world, const VehicleState& vehicle, int target_lane);

/// Instantaneous lateral relocation: reorders the lane containers, keeping
/// position and speed, and logs the event.
void execute_lane_change(World& world, int from_lane, std::size_t idx,
                         int target_lane, LcReason reason);

}  // namespace rhw
