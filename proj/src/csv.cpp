#include "rhw/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <unordered_set>

namespace rhw {

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", quantize6(x));
  return buf;
}

void write_trajectory_header(std::ostream& os) {
  os << "time_s,veh_id,lane,pos_m,speed_mps,accel_mps2,zone,equipped,crashed\n";
}

void write_trajectory_row(std::ostream& os, double time, const VehicleState& v) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.6f,%d,%d,%.6f,%.6f,%.6f,%s,%d,%d\n",
                quantize6(time), v.id, v.lane, quantize6(v.position),
                quantize6(v.speed), quantize6(v.acceleration), zone_name(v.zone),
                v.equipped ? 1 : 0, v.crashed ? 1 : 0);
  os << buf;
}

void write_events_csv(std::ostream& os, const std::vector<Event>& events) {
  os << "time_s,kind,veh_id,other_id,lane,pos_m,detail\n";
  for (const auto& e : events) {
    os << fmt6(e.time) << ',' << event_kind_name(e.kind) << ',' << e.vehicle << ','
       << e.other << ',' << e.lane << ',' << fmt6(e.position) << ',' << e.detail
       << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "scenario_id,penetration,scr_factor,seed,tit,crashes,flow_vph,min_ttc_s,"
        "ttc_events,drac_events\n";
  for (const auto& r : rows) {
    os << r.scenario_id << ',' << fmt6(r.penetration) << ',' << fmt6(r.scr_factor)
       << ',' << r.seed << ',' << fmt6(r.tit) << ',' << fmt6(r.crashes) << ','
       << fmt6(r.flow_vph) << ',' << fmt6(r.min_ttc) << ',' << fmt6(r.ttc_events)
       << ',' << fmt6(r.drac_events) << '\n';
  }
}

void write_spacetime_csv(std::ostream& os, const SpaceTimeField& field) {
  os << "t_bin_s,x_bin_m,mean_speed_mps,veh_count\n";
  for (long t = 0; t < field.t_bins; ++t) {
    for (long x = 0; x < field.x_bins; ++x) {
      const SpeedCell& c = field.at(t, x);
      if (c.count == 0) continue;  // absent, not zero
      os << fmt6(static_cast<double>(t) * field.dt_bin) << ','
         << fmt6(static_cast<double>(x) * field.dx_bin) << ',' << fmt6(c.mean())
         << ',' << c.count << '\n';
    }
  }
}

SummaryRow summary_of(const RunResult& result, const SimConfig& cfg,
                      int scenario_id) {
  SummaryRow r;
  r.scenario_id = scenario_id;
  r.penetration = cfg.penetration;
  r.scr_factor = cfg.tcs.scr_factor;
  r.seed = static_cast<long>(cfg.seed);
  r.tit = result.report.tit;
  r.crashes = static_cast<double>(result.report.crash_count);
  r.flow_vph = result.report.flow;
  r.min_ttc = std::isfinite(result.report.min_ttc) ? result.report.min_ttc : -1.0;
  r.ttc_events = static_cast<double>(result.report.critical_ttc_events);
  r.drac_events = static_cast<double>(result.report.critical_drac_events);
  return r;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RunError("cannot write output file: " + path);
  return os;
}

}  // namespace

void emit_outputs(const RunResult& result, const SimConfig& cfg, int scenario_id,
                  const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RunError("cannot create output directory: " + dir);

  auto events = open_out(dir + "/events.csv");
  write_events_csv(events, result.events);

  auto summary = open_out(dir + "/summary.csv");
  write_summary_csv(summary, {summary_of(result, cfg, scenario_id)});

  auto spacetime = open_out(dir + "/spacetime.csv");
  write_spacetime_csv(spacetime, result.report.space_time_total());
}

namespace {

struct TrajRow {
  double time;
  int veh;
  int lane;
  double pos;
  double speed;
  bool crashed;
};

// One parsed trajectory line; returns false for the header or blank lines.
bool parse_row(const char* line, TrajRow& row) {
  char* end = nullptr;
  row.time = std::strtod(line, &end);
  if (end == line || *end != ',') return false;
  const char* p = end + 1;
  row.veh = static_cast<int>(std::strtol(p, &end, 10));
  if (*end != ',') return false;
  p = end + 1;
  row.lane = static_cast<int>(std::strtol(p, &end, 10));
  if (*end != ',') return false;
  p = end + 1;
  row.pos = std::strtod(p, &end);
  if (*end != ',') return false;
  p = end + 1;
  row.speed = std::strtod(p, &end);
  if (*end != ',') return false;
  p = end + 1;
  std::strtod(p, &end);  // accel, unused
  if (*end != ',') return false;
  p = end + 1;  // zone
  const char* c1 = std::strchr(p, ',');
  if (c1 == nullptr) return false;
  p = c1 + 1;  // equipped
  const char* c2 = std::strchr(p, ',');
  if (c2 == nullptr) return false;
  row.crashed = std::strtol(c2 + 1, &end, 10) != 0;
  return true;
}

}  // namespace

TrajectoryMetrics recompute_from_trajectory(const std::string& path,
                                            const RecomputeOptions& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunError("cannot open trajectory file: " + path);

  TrajectoryMetrics m;
  const SsmConfig& cfg = opt.ssm;
  std::optional<double> anchor = opt.crash_time;
  std::vector<ConflictSample> window;
  EpisodeCounter ttc_ep, drac_ep;
  std::unordered_set<int> crashed_seen;

  std::vector<TrajRow> group;
  double group_time = 0.0;
  bool have_group = false;

  auto flush_group = [&]() {
    if (group.empty()) return;
    // New crashes first: the anchor tick's own samples belong to the window.
    std::unordered_set<int> newly_crashed;
    for (const auto& r : group) {
      if (!r.crashed || crashed_seen.count(r.veh) != 0) continue;
      newly_crashed.insert(r.veh);
      crashed_seen.insert(r.veh);
      if (!m.first_crash_time) m.first_crash_time = r.time;
    }
    if (!anchor && m.first_crash_time) anchor = *m.first_crash_time;

    const long tick = std::lround(group_time / cfg.dt);
    // Rows are written lane-major, position-descending; rebuild adjacency.
    for (std::size_t i = 0; i < group.size(); ++i) {
      const TrajRow& f = group[i];
      if (i == 0 || group[i - 1].lane != f.lane) continue;  // lane leader
      const TrajRow& l = group[i - 1];
      const double d_lf = pair_distance(l.pos, opt.veh_length, f.pos);
      // One pairwise event per follower that overlapped its leader the
      // tick it froze.
      if (d_lf <= 0.0 && newly_crashed.count(f.veh) != 0) ++m.crash_count;
      if (d_lf > cfg.conflict_range) continue;
      ConflictSample s;
      s.time = f.time;
      s.follower = f.veh;
      s.leader = l.veh;
      s.d_lf = d_lf;
      s.v_f = f.speed;
      s.v_l = l.speed;
      s.lane = f.lane;
      const auto t = ttc(s);
      if (t && *t < m.min_ttc) m.min_ttc = *t;
      ttc_ep.observe(s.follower, tick, t.has_value() && *t < cfg.ttc_star);
      drac_ep.observe(s.follower, tick, drac(s) > cfg.drac_star);
      if (anchor && in_tit_window(s.time, *anchor, cfg.tit_window)) {
        window.push_back(s);
      }
    }
    group.clear();
  };

  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (!header_skipped) {
      header_skipped = true;
      if (line.rfind("time_s,", 0) == 0) continue;
    }
    TrajRow row;
    if (!parse_row(line.c_str(), row)) continue;
    ++m.rows;
    if (have_group && row.time != group_time) flush_group();
    group_time = row.time;
    have_group = true;
    group.push_back(row);
  }
  flush_group();

  m.tit = anchor ? tit(window, cfg, *anchor) : 0.0;
  m.ttc_events = ttc_ep.count();
  m.drac_events = drac_ep.count();
  return m;
}

}  // namespace rhw
