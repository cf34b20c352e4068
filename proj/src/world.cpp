#include "rhw/world.hpp"

#include <algorithm>
#include <cmath>

#include "rhw/driver.hpp"

namespace rhw {

const char* zone_name(Zone z) {
  switch (z) {
    case Zone::Standard: return "standard";
    case Zone::Safe: return "safe";
    case Zone::Dangerous: return "dangerous";
    case Zone::NearCrash: return "near_crash";
  }
  return "?";
}

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Insert: return "insert";
    case EventKind::Exit: return "exit";
    case EventKind::LaneChange: return "lane_change";
    case EventKind::Crash: return "crash";
    case EventKind::StagedStop: return "staged_stop";
    case EventKind::HazardDetected: return "hazard_detected";
    case EventKind::Message: return "message";
    case EventKind::Release: return "release";
    case EventKind::Warning: return "warning";
  }
  return "?";
}

bool World::is_on_road(int id) const { return find(id) != nullptr; }

const VehicleState* World::find(int id) const {
  for (const auto& lane : lanes) {
    for (const auto& v : lane) {
      if (v.id == id) return &v;
    }
  }
  return nullptr;
}

World init_world(const SimConfig& cfg) {
  validate(cfg);
  World w;
  w.lanes.resize(cfg.road.lane_count);
  w.entry_queues.resize(cfg.road.lane_count);

  Rng arrivals = make_stream(cfg.seed, RngStream::Arrivals);
  Rng sampling = make_stream(cfg.seed, RngStream::Sampling);

  long count = 0;
  if (cfg.demand > 0.0) {
    const double headway = 3600.0 / cfg.demand;
    count = static_cast<long>(std::ceil(cfg.horizon / headway - 1e-9));
  }
  w.schedule.reserve(static_cast<std::size_t>(count) + 1);
  std::vector<double> equip_draws(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    Arrival a;
    a.id = static_cast<int>(k) + 1;
    a.time = static_cast<double>(k) * 3600.0 / cfg.demand;
    const double u = arrivals.uniform01();
    a.lane = std::min(cfg.road.lane_count - 1,
                      static_cast<int>(u * cfg.road.lane_count));
    a.driver = sample_driver(cfg.drivers, sampling);
    equip_draws[static_cast<std::size_t>(k)] = sampling.uniform01();
    w.schedule.push_back(a);
  }
  if (cfg.exact_quota && count > 0) {
    // Equip exactly round(p x N) vehicles: the ones with the smallest draws.
    const long quota = std::lround(cfg.penetration * static_cast<double>(count));
    std::vector<double> sorted = equip_draws;
    std::sort(sorted.begin(), sorted.end());
    const double cut = quota <= 0 ? -1.0 : sorted[static_cast<std::size_t>(quota) - 1];
    for (long k = 0; k < count; ++k) {
      w.schedule[static_cast<std::size_t>(k)].equipped =
          equip_draws[static_cast<std::size_t>(k)] <= cut;
    }
  } else {
    for (long k = 0; k < count; ++k) {
      w.schedule[static_cast<std::size_t>(k)].equipped =
          equip_draws[static_cast<std::size_t>(k)] < cfg.penetration;
    }
  }

  if (cfg.hazard.enabled) {
    Arrival trig;
    trig.id = static_cast<int>(count) + 1;
    trig.time = cfg.hazard.depart_time;
    trig.lane = cfg.road.hazard_lane;
    trig.driver = trigger_driver(cfg.drivers, cfg.hazard);
    trig.equipped = false;
    trig.is_trigger = true;
    w.trigger_id = trig.id;
    w.schedule.push_back(trig);
  }
  std::stable_sort(w.schedule.begin(), w.schedule.end(),
                   [](const Arrival& a, const Arrival& b) { return a.time < b.time; });
  return w;
}

namespace {

VehicleState make_vehicle(const Arrival& a, const SimConfig& cfg, double depart_speed,
                          long tick) {
  VehicleState v;
  v.id = a.id;
  v.lane = a.lane;
  v.position = cfg.drivers.veh_length;  // front bumper; rear at the boundary
  v.speed = depart_speed;
  v.length = cfg.drivers.veh_length;
  v.min_gap = cfg.drivers.min_gap;
  v.equipped = a.equipped;
  v.is_trigger = a.is_trigger;
  v.driver = a.driver;
  v.next_decision_tick = tick;  // decides in this tick
  v.target_speed = depart_speed;
  v.safety_speed = depart_speed;
  v.voluntary_decel_cap = a.driver.emergency_decel;
  return v;
}

}  // namespace

void insert_vehicles(World& world, const SimConfig& cfg) {
  while (world.next_arrival < world.schedule.size() &&
         world.schedule[world.next_arrival].time <= world.clock + 1e-9) {
    const Arrival& a = world.schedule[world.next_arrival];
    world.entry_queues[a.lane].push_back(a);
    ++world.next_arrival;
  }
  for (int lane = 0; lane < static_cast<int>(world.lanes.size()); ++lane) {
    auto& queue = world.entry_queues[lane];
    if (queue.empty()) continue;
    const Arrival& a = queue.front();
    const double entry_front = cfg.drivers.veh_length;
    const double desired =
        std::min(a.driver.speed_factor * cfg.road.speed_limit, a.driver.max_speed);
    double depart = desired;
    if (!world.lanes[lane].empty()) {
      const VehicleState& back = world.lanes[lane].back();
      const double raw_gap = back.rear() - entry_front;
      if (raw_gap < cfg.drivers.min_gap) continue;  // blocked, retry next tick
      const double safe = krauss_safe_speed(desired, back.speed,
                                            raw_gap - cfg.drivers.min_gap,
                                            a.driver.tau, a.driver.decel);
      if (safe < 0.0) continue;  // unsafe entry, retry next tick
      depart = std::min(desired, safe);
    }
    VehicleState v = make_vehicle(a, cfg, depart, world.tick);
    world.lanes[lane].push_back(v);
    ++world.inserted;
    world.events.push_back({world.clock, EventKind::Insert, v.id, -1, lane,
                            v.position,
                            std::string("equipped=") + (v.equipped ? "1" : "0")});
    queue.pop_front();
  }
}

void handle_exits(World& world, const SimConfig& cfg) {
  for (int lane = 0; lane < static_cast<int>(world.lanes.size()); ++lane) {
    auto& q = world.lanes[lane];
    while (!q.empty() && !q.front().crashed && q.front().rear() > cfg.road.length) {
      world.events.push_back({world.clock, EventKind::Exit, q.front().id, -1, lane,
                              q.front().position, ""});
      q.pop_front();
      ++world.exited;
    }
  }
}

}  // namespace rhw
