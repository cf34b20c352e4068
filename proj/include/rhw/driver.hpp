#pragma once

#include "rhw/types.hpp"

namespace rhw {

/// Krauss safe speed: the highest speed that still allows stopping behind
/// the leader if it brakes with deceleration `b`, given the follower keeps
/// time headway `tau_eff`. May return a negative value; callers clamp at 0.
double krauss_safe_speed(double v_follower, double v_leader, double gap,
                         double tau_eff, double b);

/// Effective car-following inputs while a gap-control overlay is active.
struct GapControlEffect {
  bool active = false;
  double tau_eff = 0.0;         // ramped desired time headway
  double space_headway = 0.0;   // demanded standstill spacing, m
  double decel_cap = 0.0;       // braking cap for gap-opening decelerations
};

/// Ramp state of a gap-control overlay at time `now`. Inactive (expired or
/// absent) states report the driver's base tau and no caps.
GapControlEffect update_gap_control(const GapControlState* state, double now,
                                    const DriverParams& driver);

struct PlanContext {
  double speed_limit = 0.0;
  double now = 0.0;
  double action_step = 0.0;  // realized decision interval, s
};

/// Desired speed: preference, vehicle limit and any speed-change request cap.
double desired_speed(const VehicleState& v, double speed_limit);

/// Deterministic planned speed (no dawdling): desired speed, acceleration
/// bound over the decision interval and the safe-speed term for `leader`.
double plan_speed_deterministic(const VehicleState& v,
                                const VehicleState* leader,
                                const PlanContext& ctx);

/// Planned speed with the dawdling imperfection; `u` is a uniform [0,1)
/// draw from the run's dawdle stream.
double plan_speed(const VehicleState& v, const VehicleState* leader,
                  const PlanContext& ctx, double u);

/// Car-following requirement with the base headway (ignores gap-control
/// widening and desired-speed preferences). Integration may brake harder
/// than the voluntary cap only to satisfy this.
double safety_requirement(const VehicleState& v, const VehicleState* leader,
                          const PlanContext& ctx);

/// Apply a speed-change request: caps desired speed at factor x limit.
void apply_scr(VehicleState& v, double factor, double speed_limit);

/// One Euler step toward `target`. Acceleration is bounded by the driver's
/// accel; braking by the voluntary cap, escalating to emergency_decel only
/// as far as the stored safety requirement demands. Crashed and staged
/// vehicles are left untouched.
void integrate(VehicleState& v, double target, double dt);

}  // namespace rhw
