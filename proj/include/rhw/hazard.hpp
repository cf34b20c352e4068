#pragma once

#include "rhw/world.hpp"

namespace rhw {

/// Scripted abrupt stop: the first tick the trigger vehicle's front bumper
/// reaches the trigger position its speed is zeroed (exempt from braking
/// clamps) and it stays immobile. Fires at most once; returns true then.
bool apply_staged_stop(World& world, const HazardPlan& plan, double step_length,
                       bool& fired);

/// Scans each lane downstream-to-upstream and reports one event per
/// follower whose front bumper overlaps its leader's rear bumper, skipping
/// pairs that are both already crashed. Events are position-descending.
std::vector<CrashEvent> detect_collisions(const World& world);

/// Freezes both vehicles of a crash: speed 0, immobile, never removed, but
/// still valid leaders for car following.
void handle_crash(World& world, const CrashEvent& event);

}  // namespace rhw
