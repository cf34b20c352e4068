#pragma once

#include <deque>
#include <map>
#include <optional>

#include "rhw/config.hpp"
#include "rhw/world.hpp"

namespace rhw {

/// Cooperative Awareness Message, emitted by equipped non-crashed vehicles
/// once per tick.
struct Cam {
  int vehicle = 0;
  double time = 0.0;
  double position = 0.0;
  int lane = 0;
  double speed = 0.0;
  double acceleration = 0.0;  // last applied
};

struct HazardLocation {
  double position = 0.0;
  int lane = 0;
  double time = 0.0;
};

enum class MessageKind { Rhw, Eebl, Scr };

struct TcsMessage {
  MessageKind kind = MessageKind::Rhw;
  int recipient = 0;
  double hazard_position = 0.0;  // RHW payload
  int hazard_lane = 0;
  double scr_factor = 1.0;       // SCR payload
  GapControlParams gap_control;  // EEBL payload
};

/// Distance upstream of the collision point covered by EEBL warnings.
/// The default reading is the stopping-distance form
///   SF x (RT x V + V^2 / (2 d));
/// the literal product RT x V x SF x V^2/(2d) is available for comparison.
double eebl_distance(const TcsConfig& cfg, double speed_limit);

/// Zone of a vehicle relative to a latched hazard. Precedence: NearCrash
/// over Dangerous over Safe over Standard; everything downstream of the
/// hazard is Standard.
Zone classify_zone(const VehicleState& v, const HazardLocation& hazard,
                   const TcsConfig& cfg, double eebl_d);

/// Messages the TCS sends for one zone. Dangerous: RHW + SCR; NearCrash:
/// RHW + SCR + EEBL; Safe: SCR + hazard-lane entry ban (carried by the RHW
/// payload of the SCR application path); Standard: nothing.
std::vector<TcsMessage> messages_for(const VehicleState& v,
                                     const HazardLocation& hazard,
                                     const TcsConfig& cfg);

/// Full broadcast for one tick: every equipped, non-crashed vehicle in an
/// influence zone. Non-equipped vehicles never receive messages.
std::vector<TcsMessage> dispatch_messages(const World& world,
                                          const HazardLocation& hazard,
                                          const TcsConfig& cfg, double eebl_d);

/// Mutates driver state per message kind. Idempotent under repeated
/// identical delivery. The recipient must be equipped and not crashed.
/// Returns true when the vehicle state actually changed.
bool apply_message(VehicleState& v, const TcsMessage& msg, double now,
                   double speed_limit);

/// The Traffic Control Server: ingests CAMs, latches the hazard on a
/// sustained-deceleration alarm, a CAM silence, or a registered collision
/// (ground-truth fallback), classifies zones and dispatches messages.
class TrafficControlServer {
public:
  TrafficControlServer(const TcsConfig& cfg, double speed_limit, double step_length,
                       bool log_all_messages);

  /// One per-tick cycle: CAM collection, hazard detection, zone
  /// classification for every vehicle, message dispatch/application and
  /// control release downstream of the hazard.
  void cycle(World& world);

  const std::optional<HazardLocation>& hazard() const { return hazard_; }
  double eebl_dist() const { return eebl_d_; }

private:
  void collect_cams(const World& world);
  void detect_hazard(World& world);

  TcsConfig cfg_;
  double speed_limit_;
  double step_length_;
  bool log_all_messages_;
  double eebl_d_;
  int alarm_window_ticks_;
  std::optional<HazardLocation> hazard_;

  struct CamTrack {
    std::deque<Cam> history;  // most recent last, bounded window
    long last_tick = -1;
  };
  std::map<int, CamTrack> cam_log_;  // ordered for deterministic scans
};

}  // namespace rhw
