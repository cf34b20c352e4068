#include "rhw/tcs.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>

#include "rhw/driver.hpp"

namespace rhw {

double eebl_distance(const TcsConfig& cfg, double speed_limit) {
  if (cfg.decel_ability <= 0.0) {
    throw ValidationError("eebl_distance: deceleration ability must be > 0");
  }
  const double v = speed_limit;
  const double braking = v * v / (2.0 * cfg.decel_ability);
  if (cfg.eebl_formula == EeblFormula::Literal) {
    return cfg.reaction_time * v * cfg.safety_factor * braking;
  }
  return cfg.safety_factor * (cfg.reaction_time * v + braking);
}

Zone classify_zone(const VehicleState& v, const HazardLocation& hazard,
                   const TcsConfig& cfg, double eebl_d) {
  const double upstream = hazard.position - v.position;
  if (upstream < 0.0 || upstream > cfg.rhw_range) return Zone::Standard;
  if (v.lane == hazard.lane) {
    return upstream <= eebl_d ? Zone::NearCrash : Zone::Dangerous;
  }
  return Zone::Safe;
}

std::vector<TcsMessage> messages_for(const VehicleState& v,
                                     const HazardLocation& hazard,
                                     const TcsConfig& cfg) {
  std::vector<TcsMessage> out;
  const Zone zone = v.zone;
  auto base = [&](MessageKind kind) {
    TcsMessage m;
    m.kind = kind;
    m.recipient = v.id;
    m.hazard_position = hazard.position;
    m.hazard_lane = hazard.lane;
    m.scr_factor = cfg.scr_factor;
    m.gap_control = cfg.gap_control;
    return m;
  };
  switch (zone) {
    case Zone::Dangerous:
      out.push_back(base(MessageKind::Rhw));
      out.push_back(base(MessageKind::Scr));
      break;
    case Zone::NearCrash:
      out.push_back(base(MessageKind::Rhw));
      out.push_back(base(MessageKind::Scr));
      out.push_back(base(MessageKind::Eebl));
      break;
    case Zone::Safe:
      out.push_back(base(MessageKind::Scr));
      break;
    case Zone::Standard:
      break;
  }
  return out;
}

std::vector<TcsMessage> dispatch_messages(const World& world,
                                          const HazardLocation& hazard,
                                          const TcsConfig& cfg, double eebl_d) {
  std::vector<TcsMessage> out;
  for (const auto& lane : world.lanes) {
    for (const auto& v : lane) {
      if (!v.equipped || v.crashed) continue;
      if (v.position > hazard.position) continue;  // no longer under control
      VehicleState tagged = v;
      tagged.zone = classify_zone(v, hazard, cfg, eebl_d);
      auto msgs = messages_for(tagged, hazard, cfg);
      out.insert(out.end(), msgs.begin(), msgs.end());
    }
  }
  return out;
}

bool apply_message(VehicleState& v, const TcsMessage& msg, double now,
                   double speed_limit) {
  assert(v.equipped && !v.crashed && "message sent to an invalid recipient");
  switch (msg.kind) {
    case MessageKind::Rhw: {
      const bool changed = !v.force_lc;
      v.force_lc = true;
      return changed;
    }
    case MessageKind::Scr: {
      const double cap = msg.scr_factor * speed_limit;
      const bool changed = !v.scr_cap || *v.scr_cap != cap;
      apply_scr(v, msg.scr_factor, speed_limit);
      return changed;
    }
    case MessageKind::Eebl: {
      if (v.gap_control) {
        const auto& gc = *v.gap_control;
        const bool expired = gc.params.duration >= 0.0 &&
                             now >= gc.start_time + gc.params.duration;
        if (!expired) return false;  // active ramp keeps its start time
      }
      GapControlState st;
      st.params = msg.gap_control;
      st.start_time = now;
      st.base_tau = v.driver.tau;
      v.gap_control = st;
      return true;
    }
  }
  return false;
}

TrafficControlServer::TrafficControlServer(const TcsConfig& cfg, double speed_limit,
                                           double step_length, bool log_all_messages)
    : cfg_(cfg),
      speed_limit_(speed_limit),
      step_length_(step_length),
      log_all_messages_(log_all_messages),
      eebl_d_(eebl_distance(cfg, speed_limit)),
      alarm_window_ticks_(
          std::max(1, static_cast<int>(std::lround(cfg.alarm_window / step_length)))) {}

void TrafficControlServer::collect_cams(const World& world) {
  for (const auto& lane : world.lanes) {
    for (const auto& v : lane) {
      if (!v.equipped || v.crashed) continue;
      auto& track = cam_log_[v.id];
      track.history.push_back(
          {v.id, world.clock, v.position, v.lane, v.speed, v.acceleration});
      if (track.history.size() >
          static_cast<std::size_t>(alarm_window_ticks_) + 1) {
        track.history.pop_front();
      }
      track.last_tick = world.tick;
    }
  }
}

void TrafficControlServer::detect_hazard(World& world) {
  auto latch = [&](double pos, int lane, int source, const char* mode) {
    hazard_ = HazardLocation{pos, lane, world.clock};
    world.events.push_back({world.clock, EventKind::HazardDetected, source, -1, lane,
                            pos, std::string("mode=") + mode});
    cam_log_.clear();  // detection is done; drop the history
  };

  // Sustained deceleration over the full alarm window. Requiring the whole
  // window keeps transient speed adjustments (dawdling chased by the
  // integrator for a tick or two) from raising false alarms.
  for (const auto& [id, track] : cam_log_) {
    if (track.last_tick != world.tick) continue;
    if (track.history.size() != static_cast<std::size_t>(alarm_window_ticks_) + 1) {
      continue;
    }
    const Cam& oldest = track.history.front();
    const Cam& newest = track.history.back();
    const double elapsed = static_cast<double>(alarm_window_ticks_) * step_length_;
    const double decel = (oldest.speed - newest.speed) / elapsed;
    // Small guard so braking pinned exactly at the threshold (emergency
    // braking equals it by default) triggers regardless of rounding.
    if (decel >= cfg_.decel_alarm_threshold - 1e-9) {
      latch(newest.position, newest.lane, id, "decel");
      return;
    }
  }

  // Transmission silence from a vehicle still on the road.
  std::vector<int> stale;
  for (const auto& [id, track] : cam_log_) {
    const long silent = world.tick - track.last_tick;
    if (silent < cfg_.cam_silence_ticks) continue;
    if (silent > cfg_.cam_silence_ticks + 10) {
      stale.push_back(id);  // long gone (exited); stop tracking
      continue;
    }
    if (!world.is_on_road(id)) continue;
    const Cam& last = track.history.back();
    latch(last.position, last.lane, id, "silence");
    return;
  }
  for (int id : stale) cam_log_.erase(id);

  // Ground-truth fallback: a registered collision latches the hazard even
  // when no equipped vehicle was close enough to signal it.
  if (cfg_.ground_truth_detection && !world.crashes.empty()) {
    const CrashEvent& c = world.crashes.front();
    latch(c.position, c.lane, c.follower, "crash");
  }
}

void TrafficControlServer::cycle(World& world) {
  if (!hazard_) {
    collect_cams(world);
    detect_hazard(world);
  }

  for (auto& lane : world.lanes) {
    for (auto& v : lane) {
      v.zone = hazard_ ? classify_zone(v, *hazard_, cfg_, eebl_d_) : Zone::Standard;
      if (!v.equipped || v.crashed || !hazard_) continue;

      if (v.position > hazard_->position) {
        // Past the conflict area: speed and lane choice are the driver's again.
        const bool had_controls =
            v.force_lc || v.scr_cap || v.gap_control || v.lane_entry_ban;
        if (had_controls) {
          v.force_lc = false;
          v.scr_cap.reset();
          v.gap_control.reset();
          v.lane_entry_ban.reset();
          world.events.push_back({world.clock, EventKind::Release, v.id, -1, v.lane,
                                  v.position, ""});
        }
        continue;
      }

      for (const TcsMessage& msg : messages_for(v, *hazard_, cfg_)) {
        const bool changed = apply_message(v, msg, world.clock, speed_limit_);
        if (changed || log_all_messages_) {
          const char* name = msg.kind == MessageKind::Rhw   ? "rhw"
                             : msg.kind == MessageKind::Scr ? "scr"
                                                            : "eebl";
          char detail[48];
          if (msg.kind == MessageKind::Scr) {
            std::snprintf(detail, sizeof detail, "scr=%.6f", msg.scr_factor);
          } else {
            std::snprintf(detail, sizeof detail, "%s", name);
          }
          world.events.push_back({world.clock, EventKind::Message, v.id, -1, v.lane,
                                  v.position, detail});
        }
      }
      if (v.zone == Zone::Safe && !v.lane_entry_ban) {
        v.lane_entry_ban = hazard_->lane;
      }
    }
  }
}

}  // namespace rhw
