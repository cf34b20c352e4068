#include "rhw/driver.hpp"

#include <algorithm>
#include <cmath>

namespace rhw {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Bumper gap usable for car following: physical gap minus the standstill
// spacing, minus any unmet gap-control space headway.
double following_gap(const VehicleState& v, const VehicleState& leader,
                     double extra_space) {
  const double raw = leader.rear() - v.position;
  return std::max(0.0, raw - v.min_gap - extra_space);
}

}  // namespace

double krauss_safe_speed(double v_follower, double v_leader, double gap,
                         double tau_eff, double b) {
  if (!std::isfinite(v_follower) || !std::isfinite(v_leader) ||
      !std::isfinite(gap) || !std::isfinite(tau_eff) || !std::isfinite(b)) {
    throw ValidationError("krauss_safe_speed: non-finite input");
  }
  const double denom = (v_leader + v_follower) / (2.0 * b) + tau_eff;
  return v_leader + (gap - v_leader * tau_eff) / denom;
}

GapControlEffect update_gap_control(const GapControlState* state, double now,
                                    const DriverParams& driver) {
  GapControlEffect out;
  out.tau_eff = driver.tau;
  out.decel_cap = driver.emergency_decel;
  if (state == nullptr) return out;
  const auto& p = state->params;
  const bool expired = p.duration >= 0.0 && now >= state->start_time + p.duration;
  if (expired) return out;
  out.active = true;
  const double ramp = state->base_tau + p.change_rate * (now - state->start_time);
  out.tau_eff = std::min(p.target_time_headway, std::max(state->base_tau, ramp));
  out.space_headway = p.target_space_headway;
  out.decel_cap = p.max_decel;
  return out;
}

double desired_speed(const VehicleState& v, double speed_limit) {
  double desired = std::min(v.driver.speed_factor * speed_limit, v.driver.max_speed);
  if (v.scr_cap) desired = std::min(desired, *v.scr_cap);
  return desired;
}

namespace {

double plan_core(const VehicleState& v, const VehicleState* leader,
                 const PlanContext& ctx) {
  double target = std::min(desired_speed(v, ctx.speed_limit),
                           v.speed + v.driver.accel * ctx.action_step);
  if (leader != nullptr) {
    const GapControlEffect gc =
        update_gap_control(v.gap_control ? &*v.gap_control : nullptr, ctx.now, v.driver);
    // The space-headway demand counts only beyond the min_gap already kept.
    const double extra =
        gc.active ? std::max(0.0, gc.space_headway - v.min_gap) : 0.0;
    const double gap = following_gap(v, *leader, extra);
    const double safe =
        krauss_safe_speed(v.speed, leader->speed, gap, gc.tau_eff, v.driver.decel);
    target = std::min(target, std::max(0.0, safe));
  }
  return target;
}

}  // namespace

double plan_speed_deterministic(const VehicleState& v, const VehicleState* leader,
                                const PlanContext& ctx) {
  return std::max(0.0, plan_core(v, leader, ctx));
}

double plan_speed(const VehicleState& v, const VehicleState* leader,
                  const PlanContext& ctx, double u) {
  const double det = plan_core(v, leader, ctx);
  const double dawdle = v.driver.sigma * v.driver.accel * ctx.action_step * u;
  return std::max(0.0, det - dawdle);
}

double safety_requirement(const VehicleState& v, const VehicleState* leader,
                          const PlanContext& ctx) {
  double req = v.speed + v.driver.accel * ctx.action_step;
  if (leader != nullptr) {
    const double gap = following_gap(v, *leader, 0.0);
    const double safe =
        krauss_safe_speed(v.speed, leader->speed, gap, v.driver.tau, v.driver.decel);
    req = std::min(req, std::max(0.0, safe));
  }
  return req;
}

void apply_scr(VehicleState& v, double factor, double speed_limit) {
  if (!(factor > 0.0) || factor > 1.0) {
    throw ValidationError("apply_scr: factor must be in (0, 1], got " +
                          std::to_string(factor));
  }
  v.scr_cap = factor * speed_limit;
}

void integrate(VehicleState& v, double target, double dt) {
  if (v.crashed || v.staged_stop) return;
  const double ceil = v.speed + v.driver.accel * dt;
  const double emergency_floor = v.speed - v.driver.emergency_decel * dt;
  double floor = v.speed - v.voluntary_decel_cap * dt;
  // Escalate past the voluntary cap only as far as car-following safety
  // demands; emergency_decel stays the physical limit.
  if (v.safety_speed < floor) floor = std::max(v.safety_speed, emergency_floor);
  double next = clamp(target, floor, ceil);
  next = std::max(0.0, next);
  v.acceleration = (next - v.speed) / dt;
  v.speed = next;
  v.position += next * dt;
}

}  // namespace rhw
