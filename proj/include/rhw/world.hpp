#pragma once

#include <deque>
#include <vector>

#include "rhw/config.hpp"
#include "rhw/types.hpp"

namespace rhw {

/// A scheduled network entry, materialized at init time so that the random
/// streams are consumed identically regardless of run dynamics.
struct Arrival {
  int id = 0;
  double time = 0.0;
  int lane = 0;
  DriverParams driver;
  bool equipped = false;
  bool is_trigger = false;
};

struct World {
  double clock = 0.0;
  long tick = 0;
  std::vector<std::deque<VehicleState>> lanes;  // position-descending per lane
  std::vector<Arrival> schedule;                // time-sorted
  std::size_t next_arrival = 0;
  std::vector<std::deque<Arrival>> entry_queues;  // due but blocked, per lane
  long inserted = 0;
  long exited = 0;
  int trigger_id = -1;  // id of the staged vehicle, -1 if none scheduled
  std::vector<Event> events;
  std::vector<CrashEvent> crashes;

  long on_road() const {
    long n = 0;
    for (const auto& lane : lanes) n += static_cast<long>(lane.size());
    return n;
  }
  bool is_on_road(int id) const;
  const VehicleState* find(int id) const;
  long queued() const {
    long n = 0;
    for (const auto& q : entry_queues) n += static_cast<long>(q.size());
    return n;
  }
};

/// Validates the config, seeds the random streams and materializes the
/// arrival schedule (uniform headways of 3600/demand seconds, lane by fair
/// coin, plus the staged trigger vehicle when the hazard plan is enabled).
World init_world(const SimConfig& cfg);

/// Moves due arrivals into the per-lane entry queues and inserts queue
/// heads whose entry is safe (non-negative safe speed, no min_gap
/// overlap). Blocked arrivals stay queued and are retried next tick.
void insert_vehicles(World& world, const SimConfig& cfg);

/// Removes vehicles whose rear bumper passed the end of the road.
void handle_exits(World& world, const SimConfig& cfg);

/// Immediate leader of lanes[lane][idx], or nullptr for the front vehicle.
inline const VehicleState* leader_of(const World& world, int lane, std::size_t idx) {
  if (idx == 0) return nullptr;
  return &world.lanes[lane][idx - 1];
}

}  // namespace rhw
