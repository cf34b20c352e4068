#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rhw/rng.hpp"
#include "rhw/tcs.hpp"

using namespace rhw;

namespace {

SimConfig empty_config() {
  SimConfig cfg;
  cfg.demand = 0.0;
  cfg.hazard.enabled = false;
  return cfg;
}

VehicleState vehicle(int id, int lane, double pos, double speed, bool equipped) {
  VehicleState v;
  v.id = id;
  v.lane = lane;
  v.position = pos;
  v.speed = speed;
  v.equipped = equipped;
  return v;
}

void put(World& w, const VehicleState& v) {
  auto& q = w.lanes[v.lane];
  auto it = std::lower_bound(
      q.begin(), q.end(), v.position,
      [](const VehicleState& a, double p) { return a.position > p; });
  q.insert(it, v);
}

void tick(World& w, TrafficControlServer& tcs, double step = 0.1) {
  tcs.cycle(w);
  ++w.tick;
  w.clock = static_cast<double>(w.tick) * step;
}

}  // namespace

TEST_CASE("EEBL distance, adopted and literal readings") {
  TcsConfig cfg;  // RT 0.9, SF 2, d 4.5
  const double v = 30.56;
  const double expected = 2.0 * (0.9 * v + v * v / (2.0 * 4.5));
  CHECK(eebl_distance(cfg, v) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(eebl_distance(cfg, v) == doctest::Approx(262.544356).epsilon(1e-6));

  // braking term vanishes for very capable brakes
  TcsConfig strong = cfg;
  strong.decel_ability = 1e12;
  CHECK(eebl_distance(strong, v) == doctest::Approx(2.0 * 0.9 * v).epsilon(1e-9));

  // pure braking distance when SF = 1 and RT = 0
  TcsConfig pure = cfg;
  pure.safety_factor = 1.0;
  pure.reaction_time = 0.0;
  CHECK(eebl_distance(pure, v) == doctest::Approx(v * v / 9.0).epsilon(1e-12));

  TcsConfig literal = cfg;
  literal.eebl_formula = EeblFormula::Literal;
  CHECK(eebl_distance(literal, v) ==
        doctest::Approx(0.9 * v * 2.0 * (v * v / 9.0)).epsilon(1e-12));

  TcsConfig bad = cfg;
  bad.decel_ability = 0.0;
  CHECK_THROWS_AS(eebl_distance(bad, v), ValidationError);
}

TEST_CASE("zone classification intervals") {
  TcsConfig cfg;
  const double eebl = eebl_distance(cfg, 30.56);  // ~262.5 < 500
  const HazardLocation hz{4000.0, 0, 431.0};

  CHECK(classify_zone(vehicle(1, 0, 3700.0, 20, true), hz, cfg, eebl) ==
        Zone::Dangerous);
  CHECK(classify_zone(vehicle(1, 0, 3900.0, 20, true), hz, cfg, eebl) ==
        Zone::NearCrash);
  CHECK(classify_zone(vehicle(1, 1, 3700.0, 20, true), hz, cfg, eebl) == Zone::Safe);
  CHECK(classify_zone(vehicle(1, 1, 3400.0, 20, true), hz, cfg, eebl) ==
        Zone::Standard);  // outside the RHW range
  CHECK(classify_zone(vehicle(1, 0, 4100.0, 20, true), hz, cfg, eebl) ==
        Zone::Standard);  // downstream of the hazard
}

TEST_CASE("zone partition is exhaustive and nested") {
  TcsConfig cfg;
  const double eebl = eebl_distance(cfg, 30.56);
  const HazardLocation hz{4000.0, 0, 0.0};
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const int lane = rng.uniform01() < 0.5 ? 0 : 1;
    const double pos = rng.uniform01() * 5000.0;
    const Zone z = classify_zone(vehicle(1, lane, pos, 20, true), hz, cfg, eebl);
    const double upstream = hz.position - pos;
    switch (z) {
      case Zone::NearCrash:
        CHECK(lane == hz.lane);
        CHECK(upstream >= 0.0);
        CHECK(upstream <= eebl);
        break;
      case Zone::Dangerous:
        CHECK(lane == hz.lane);
        CHECK(upstream > eebl);
        CHECK(upstream <= cfg.rhw_range);
        break;
      case Zone::Safe:
        CHECK(lane != hz.lane);
        CHECK(upstream >= 0.0);
        CHECK(upstream <= cfg.rhw_range);
        break;
      case Zone::Standard:
        CHECK((upstream < 0.0 || upstream > cfg.rhw_range || lane != hz.lane));
        break;
    }
  }
}

TEST_CASE("message sets per zone; non-equipped receive nothing") {
  SimConfig cfg = empty_config();
  World w = init_world(cfg);
  const HazardLocation hz{4000.0, 0, 0.0};
  const double eebl = eebl_distance(cfg.tcs, cfg.road.speed_limit);

  put(w, vehicle(1, 0, 3900.0, 20, true));   // NearCrash
  put(w, vehicle(2, 0, 3700.0, 20, true));   // Dangerous
  put(w, vehicle(3, 1, 3700.0, 20, true));   // Safe
  put(w, vehicle(4, 0, 3000.0, 20, true));   // Standard
  put(w, vehicle(5, 0, 3890.0, 20, false));  // NearCrash but not equipped

  const auto msgs = dispatch_messages(w, hz, cfg.tcs, eebl);
  int rhw1 = 0, scr1 = 0, eebl1 = 0, total5 = 0, rhw2 = 0, scr3 = 0;
  for (const auto& m : msgs) {
    CHECK(m.recipient != 5);
    if (m.recipient == 1) {
      rhw1 += m.kind == MessageKind::Rhw;
      scr1 += m.kind == MessageKind::Scr;
      eebl1 += m.kind == MessageKind::Eebl;
    }
    if (m.recipient == 2) rhw2 += m.kind == MessageKind::Rhw;
    if (m.recipient == 3) {
      CHECK(m.kind == MessageKind::Scr);
      scr3 += 1;
    }
    total5 += m.recipient == 4;
  }
  CHECK(rhw1 == 1);
  CHECK(scr1 == 1);
  CHECK(eebl1 == 1);
  CHECK(rhw2 == 1);
  CHECK(scr3 == 1);
  CHECK(total5 == 0);  // standard zone gets nothing
}

TEST_CASE("apply_message is idempotent") {
  VehicleState v = vehicle(1, 0, 3900.0, 20, true);
  v.driver.tau = 2.0;
  TcsMessage eebl;
  eebl.kind = MessageKind::Eebl;
  eebl.recipient = 1;
  eebl.gap_control = GapControlParams{};

  CHECK(apply_message(v, eebl, 100.0, 30.56));
  REQUIRE(v.gap_control.has_value());
  CHECK(v.gap_control->start_time == doctest::Approx(100.0));
  // a second delivery one tick later keeps the original ramp
  CHECK_FALSE(apply_message(v, eebl, 100.1, 30.56));
  CHECK(v.gap_control->start_time == doctest::Approx(100.0));

  TcsMessage scr;
  scr.kind = MessageKind::Scr;
  scr.recipient = 1;
  scr.scr_factor = 0.85;
  CHECK(apply_message(v, scr, 100.0, 30.56));
  const double cap = *v.scr_cap;
  CHECK_FALSE(apply_message(v, scr, 100.1, 30.56));
  CHECK(*v.scr_cap == cap);

  TcsMessage rhw;
  rhw.kind = MessageKind::Rhw;
  rhw.recipient = 1;
  CHECK(apply_message(v, rhw, 100.0, 30.56));
  CHECK(v.force_lc);
  CHECK_FALSE(apply_message(v, rhw, 100.1, 30.56));
}

TEST_CASE("deceleration alarm latches the hazard") {
  SimConfig cfg = empty_config();
  World w = init_world(cfg);
  put(w, vehicle(7, 0, 3800.0, 30.0, true));
  TrafficControlServer tcs(cfg.tcs, cfg.road.speed_limit, cfg.step_length, false);

  // braking 6 m/s^2, sustained across the whole alarm window
  tick(w, tcs);
  for (int i = 0; i < 9; ++i) {
    CHECK_FALSE(tcs.hazard().has_value());
    w.lanes[0][0].speed -= 0.6;
    w.lanes[0][0].position += w.lanes[0][0].speed * 0.1;
    tick(w, tcs);
  }
  REQUIRE(tcs.hazard().has_value());
  CHECK(tcs.hazard()->lane == 0);
  CHECK(tcs.hazard()->position == doctest::Approx(w.lanes[0][0].position));

  // latched: a later crash elsewhere does not move it
  const double latched_pos = tcs.hazard()->position;
  w.crashes.push_back({1.3, 99, 98, 1, 1000.0});
  tick(w, tcs);
  CHECK(tcs.hazard()->position == doctest::Approx(latched_pos));
}

TEST_CASE("dawdling-scale slowdowns do not trip the alarm") {
  SimConfig cfg = empty_config();
  World w = init_world(cfg);
  put(w, vehicle(7, 0, 1000.0, 30.0, true));
  TrafficControlServer tcs(cfg.tcs, cfg.road.speed_limit, cfg.step_length, false);
  // one 0.45 m/s drop chased at the emergency rate for a single tick,
  // then steady: the windowed mean stays well under the threshold
  for (int i = 0; i < 30; ++i) {
    if (i == 5) w.lanes[0][0].speed -= 0.45;
    w.lanes[0][0].position += w.lanes[0][0].speed * 0.1;
    tick(w, tcs);
  }
  CHECK_FALSE(tcs.hazard().has_value());
}

TEST_CASE("CAM silence from an on-road vehicle latches the hazard") {
  SimConfig cfg = empty_config();
  cfg.tcs.ground_truth_detection = false;
  World w = init_world(cfg);
  put(w, vehicle(7, 0, 3980.0, 20.0, true));
  TrafficControlServer tcs(cfg.tcs, cfg.road.speed_limit, cfg.step_length, false);

  tick(w, tcs);
  tick(w, tcs);
  w.lanes[0][0].crashed = true;  // transmission stops, vehicle stays on road
  for (int i = 0; i < cfg.tcs.cam_silence_ticks; ++i) {
    CHECK_FALSE(tcs.hazard().has_value());
    tick(w, tcs);
  }
  REQUIRE(tcs.hazard().has_value());
  CHECK(tcs.hazard()->position == doctest::Approx(3980.0));
}

TEST_CASE("ground-truth fallback latches at the first crash") {
  SimConfig cfg = empty_config();
  World w = init_world(cfg);
  put(w, vehicle(7, 0, 3000.0, 20.0, false));  // nobody equipped
  TrafficControlServer tcs(cfg.tcs, cfg.road.speed_limit, cfg.step_length, false);

  tick(w, tcs);
  CHECK_FALSE(tcs.hazard().has_value());
  w.crashes.push_back({0.1, 12, 11, 0, 4001.5});
  tick(w, tcs);
  REQUIRE(tcs.hazard().has_value());
  CHECK(tcs.hazard()->position == doctest::Approx(4001.5));
  CHECK(tcs.hazard()->lane == 0);
}

TEST_CASE("controls are applied by zone and released downstream") {
  SimConfig cfg = empty_config();
  cfg.tcs.scr_factor = 0.5;
  World w = init_world(cfg);
  put(w, vehicle(7, 0, 3900.0, 20.0, true));  // NearCrash once latched
  put(w, vehicle(8, 1, 3700.0, 20.0, true));  // Safe once latched
  TrafficControlServer tcs(cfg.tcs, cfg.road.speed_limit, cfg.step_length, false);
  w.crashes.push_back({0.0, 12, 11, 0, 4000.0});

  tick(w, tcs);
  auto& near = w.lanes[0][0];
  auto& safe = w.lanes[1][0];
  CHECK(near.zone == Zone::NearCrash);
  CHECK(near.force_lc);
  CHECK(near.gap_control.has_value());
  CHECK(*near.scr_cap == doctest::Approx(0.5 * 30.56));
  CHECK(safe.zone == Zone::Safe);
  CHECK_FALSE(safe.force_lc);
  CHECK_FALSE(safe.gap_control.has_value());
  CHECK(*safe.scr_cap == doctest::Approx(0.5 * 30.56));
  REQUIRE(safe.lane_entry_ban.has_value());
  CHECK(*safe.lane_entry_ban == 0);

  // past the conflict area: all controls drop within one cycle
  near.position = 4000.1;
  tick(w, tcs);
  CHECK_FALSE(near.force_lc);
  CHECK_FALSE(near.scr_cap.has_value());
  CHECK_FALSE(near.gap_control.has_value());
  CHECK(near.zone == Zone::Standard);
}
