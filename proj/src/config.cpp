#include "rhw/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "rhw/tcs.hpp"

namespace rhw {

bool operator==(const RoadNetwork& a, const RoadNetwork& b) {
  return a.length == b.length && a.lane_count == b.lane_count &&
         a.speed_limit == b.speed_limit && a.hazard_lane == b.hazard_lane;
}

bool operator==(const HazardPlan& a, const HazardPlan& b) {
  return a.enabled == b.enabled && a.trigger_position == b.trigger_position &&
         a.depart_time == b.depart_time && a.speed_factor == b.speed_factor;
}

bool operator==(const GapControlParams& a, const GapControlParams& b) {
  return a.target_time_headway == b.target_time_headway &&
         a.target_space_headway == b.target_space_headway &&
         a.duration == b.duration && a.change_rate == b.change_rate &&
         a.max_decel == b.max_decel;
}

bool operator==(const SimConfig& a, const SimConfig& b) {
  return a.road == b.road && a.step_length == b.step_length &&
         a.horizon == b.horizon && a.demand == b.demand &&
         a.penetration == b.penetration && a.exact_quota == b.exact_quota &&
         a.seed == b.seed && a.drivers == b.drivers && a.tcs == b.tcs &&
         a.hazard == b.hazard && a.ssm == b.ssm && a.output == b.output;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ValidationError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ValidationError("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ValidationError("key '" + key + "': expected true/false, got '" + v + "'");
}

// `normal(mean,std)[min,max]` or a bare number.
DistSpec parse_dist(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s.rfind("normal", 0) != 0) return DistSpec::constant(parse_double(key, s));
  const size_t open = s.find('(');
  const size_t close = s.find(')');
  const size_t bopen = s.find('[');
  const size_t bclose = s.find(']');
  if (open == std::string::npos || close == std::string::npos ||
      bopen == std::string::npos || bclose == std::string::npos ||
      close < open || bopen < close || bclose < bopen) {
    throw ValidationError("key '" + key +
                          "': expected normal(mean,std)[min,max], got '" + v + "'");
  }
  auto split2 = [&](const std::string& inner) {
    const size_t comma = inner.find(',');
    if (comma == std::string::npos) {
      throw ValidationError("key '" + key + "': expected two comma-separated values");
    }
    return std::pair<double, double>{
        parse_double(key, trim(inner.substr(0, comma))),
        parse_double(key, trim(inner.substr(comma + 1)))};
  };
  const auto [mean, sd] = split2(s.substr(open + 1, close - open - 1));
  const auto [lo, hi] = split2(s.substr(bopen + 1, bclose - bopen - 1));
  return DistSpec::normal(mean, sd, lo, hi);
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt_dist(const DistSpec& d) {
  if (!d.is_normal) return fmt_double(d.value);
  return "normal(" + fmt_double(d.mean) + "," + fmt_double(d.stddev) + ")[" +
         fmt_double(d.min) + "," + fmt_double(d.max) + "]";
}

struct KeyDef {
  std::string section;
  std::string key;
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

std::vector<KeyDef> key_table() {
  std::vector<KeyDef> t;
  auto dbl = [&](const char* sec, const char* key, auto member) {
    t.push_back({sec, key,
                 [member, sec, key](SimConfig& c, const std::string& v) {
                   c.*member = parse_double(std::string(sec) + "." + key, v);
                 },
                 [member](const SimConfig& c) { return fmt_double(c.*member); }});
  };
  auto sub_dbl = [&](const char* sec, const char* key, auto sub, auto member) {
    t.push_back({sec, key,
                 [sub, member, sec, key](SimConfig& c, const std::string& v) {
                   (c.*sub).*member = parse_double(std::string(sec) + "." + key, v);
                 },
                 [sub, member](const SimConfig& c) {
                   return fmt_double((c.*sub).*member);
                 }});
  };
  auto sub_bool = [&](const char* sec, const char* key, auto sub, auto member) {
    t.push_back({sec, key,
                 [sub, member, sec, key](SimConfig& c, const std::string& v) {
                   (c.*sub).*member = parse_bool(std::string(sec) + "." + key, v);
                 },
                 [sub, member](const SimConfig& c) {
                   return (c.*sub).*member ? std::string("true") : std::string("false");
                 }});
  };
  auto drv_dist = [&](const char* key, DistSpec DriverDistributions::* member) {
    t.push_back({"drivers", key,
                 [member, key](SimConfig& c, const std::string& v) {
                   c.drivers.*member = parse_dist(std::string("drivers.") + key, v);
                 },
                 [member](const SimConfig& c) { return fmt_dist(c.drivers.*member); }});
  };
  auto drv_dbl = [&](const char* key, double DriverDistributions::* member) {
    sub_dbl("drivers", key, &SimConfig::drivers, member);
  };
  auto tcs_dbl = [&](const char* key, double TcsConfig::* member) {
    sub_dbl("tcs", key, &SimConfig::tcs, member);
  };
  auto gc_dbl = [&](const char* key, double GapControlParams::* member) {
    t.push_back({"tcs", key,
                 [member, key](SimConfig& c, const std::string& v) {
                   c.tcs.gap_control.*member =
                       parse_double(std::string("tcs.") + key, v);
                 },
                 [member](const SimConfig& c) {
                   return fmt_double(c.tcs.gap_control.*member);
                 }});
  };
  auto ssm_dbl = [&](const char* key, double SsmConfig::* member) {
    sub_dbl("ssm", key, &SimConfig::ssm, member);
  };

  // [road]
  sub_dbl("road", "length", &SimConfig::road, &RoadNetwork::length);
  t.push_back({"road", "lanes",
               [](SimConfig& c, const std::string& v) {
                 c.road.lane_count = static_cast<int>(parse_int("road.lanes", v));
               },
               [](const SimConfig& c) { return std::to_string(c.road.lane_count); }});
  sub_dbl("road", "speed_limit", &SimConfig::road, &RoadNetwork::speed_limit);
  t.push_back({"road", "hazard_lane",
               [](SimConfig& c, const std::string& v) {
                 c.road.hazard_lane = static_cast<int>(parse_int("road.hazard_lane", v));
               },
               [](const SimConfig& c) { return std::to_string(c.road.hazard_lane); }});

  // [demand]
  dbl("demand", "rate_vph", &SimConfig::demand);
  dbl("demand", "horizon_s", &SimConfig::horizon);
  dbl("demand", "step_length_s", &SimConfig::step_length);
  dbl("demand", "penetration", &SimConfig::penetration);
  t.push_back({"demand", "exact_quota",
               [](SimConfig& c, const std::string& v) {
                 c.exact_quota = parse_bool("demand.exact_quota", v);
               },
               [](const SimConfig& c) {
                 return c.exact_quota ? std::string("true") : std::string("false");
               }});
  t.push_back({"demand", "seed",
               [](SimConfig& c, const std::string& v) {
                 c.seed = static_cast<std::uint64_t>(parse_int("demand.seed", v));
               },
               [](const SimConfig& c) { return std::to_string(c.seed); }});

  // [drivers]
  drv_dist("sigma", &DriverDistributions::sigma);
  drv_dist("decel", &DriverDistributions::decel);
  drv_dist("accel", &DriverDistributions::accel);
  drv_dist("speed_factor", &DriverDistributions::speed_factor);
  drv_dbl("tau", &DriverDistributions::tau);
  drv_dbl("emergency_decel", &DriverDistributions::emergency_decel);
  drv_dbl("lc_assertive", &DriverDistributions::lc_assertive);
  drv_dbl("action_step_length", &DriverDistributions::action_step_length);
  drv_dbl("max_speed", &DriverDistributions::max_speed);
  drv_dbl("veh_length", &DriverDistributions::veh_length);
  drv_dbl("min_gap", &DriverDistributions::min_gap);
  drv_dbl("speed_gain_threshold", &DriverDistributions::speed_gain_threshold);

  // [tcs]
  tcs_dbl("rhw_range", &TcsConfig::rhw_range);
  tcs_dbl("reaction_time", &TcsConfig::reaction_time);
  tcs_dbl("safety_factor", &TcsConfig::safety_factor);
  tcs_dbl("decel_ability", &TcsConfig::decel_ability);
  tcs_dbl("scr_factor", &TcsConfig::scr_factor);
  tcs_dbl("decel_alarm_threshold", &TcsConfig::decel_alarm_threshold);
  tcs_dbl("alarm_window_s", &TcsConfig::alarm_window);
  t.push_back({"tcs", "cam_silence_ticks",
               [](SimConfig& c, const std::string& v) {
                 c.tcs.cam_silence_ticks =
                     static_cast<int>(parse_int("tcs.cam_silence_ticks", v));
               },
               [](const SimConfig& c) {
                 return std::to_string(c.tcs.cam_silence_ticks);
               }});
  sub_bool("tcs", "ground_truth_detection", &SimConfig::tcs,
           &TcsConfig::ground_truth_detection);
  t.push_back({"tcs", "eebl_formula",
               [](SimConfig& c, const std::string& v) {
                 if (v == "adopted") {
                   c.tcs.eebl_formula = EeblFormula::Adopted;
                 } else if (v == "literal") {
                   c.tcs.eebl_formula = EeblFormula::Literal;
                 } else {
                   throw ValidationError(
                       "key 'tcs.eebl_formula': expected adopted|literal, got '" + v +
                       "'");
                 }
               },
               [](const SimConfig& c) {
                 return c.tcs.eebl_formula == EeblFormula::Adopted
                            ? std::string("adopted")
                            : std::string("literal");
               }});
  gc_dbl("gc_time_headway", &GapControlParams::target_time_headway);
  gc_dbl("gc_space_headway", &GapControlParams::target_space_headway);
  gc_dbl("gc_duration", &GapControlParams::duration);
  gc_dbl("gc_change_rate", &GapControlParams::change_rate);
  gc_dbl("gc_max_decel", &GapControlParams::max_decel);

  // [hazard]
  sub_bool("hazard", "enabled", &SimConfig::hazard, &HazardPlan::enabled);
  sub_dbl("hazard", "trigger_position", &SimConfig::hazard,
          &HazardPlan::trigger_position);
  sub_dbl("hazard", "depart_time", &SimConfig::hazard, &HazardPlan::depart_time);
  sub_dbl("hazard", "speed_factor", &SimConfig::hazard, &HazardPlan::speed_factor);

  // [ssm]
  ssm_dbl("ttc_star", &SsmConfig::ttc_star);
  ssm_dbl("drac_star", &SsmConfig::drac_star);
  ssm_dbl("tit_window", &SsmConfig::tit_window);
  ssm_dbl("dt", &SsmConfig::dt);
  ssm_dbl("conflict_range", &SsmConfig::conflict_range);
  ssm_dbl("dt_bin", &SsmConfig::dt_bin);
  ssm_dbl("dx_bin", &SsmConfig::dx_bin);

  // [output]
  sub_bool("output", "trajectory", &SimConfig::output, &OutputConfig::trajectory);
  sub_bool("output", "log_all_messages", &SimConfig::output,
           &OutputConfig::log_all_messages);
  return t;
}

const std::vector<KeyDef>& keys() {
  static const std::vector<KeyDef> table = key_table();
  return table;
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
  SimConfig cfg;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ValidationError("line " + std::to_string(lineno) +
                              ": malformed section header '" + raw + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& k : keys()) known = known || k.section == section;
      if (!known) {
        throw ValidationError("line " + std::to_string(lineno) +
                              ": unknown section '" + section + "'");
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("line " + std::to_string(lineno) +
                            ": expected 'key = value', got '" + raw + "'");
    }
    if (section.empty()) {
      throw ValidationError("line " + std::to_string(lineno) +
                            ": key outside of any [section]");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) {
      throw ValidationError("duplicate key '" + full + "'");
    }
    const KeyDef* def = nullptr;
    for (const auto& k : keys()) {
      if (k.section == section && k.key == key) {
        def = &k;
        break;
      }
    }
    if (def == nullptr) throw ValidationError("unknown key '" + full + "'");
    def->set(cfg, value);
  }
  validate(cfg);
  return cfg;
}

SimConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const SimConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!out.empty()) out += "\n";
      out += "[" + k.section + "]\n";
      section = k.section;
    }
    out += k.key + " = " + k.get(cfg) + "\n";
  }
  return out;
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

void check_dist(const char* name, const DistSpec& d, double lo_bound,
                double hi_bound) {
  if (d.is_normal) {
    require(d.stddev >= 0.0, std::string(name) + ": stddev must be >= 0");
    require(d.min < d.max, std::string(name) + ": clip bounds need min < max");
    require(d.min >= lo_bound && d.max <= hi_bound,
            std::string(name) + ": clip bounds outside the valid range");
  } else {
    require(d.value >= lo_bound && d.value <= hi_bound,
            std::string(name) + ": value outside the valid range");
  }
}

bool is_multiple(double x, double base) {
  const double k = std::round(x / base);
  return k >= 1.0 && std::abs(k * base - x) < 1e-6;
}

}  // namespace

void validate(const SimConfig& cfg) {
  require(cfg.road.length > 0.0, "road.length: must be > 0");
  require(cfg.road.lane_count >= 2, "road.lanes: must be >= 2");
  require(cfg.road.speed_limit > 0.0, "road.speed_limit: must be > 0");
  require(cfg.road.hazard_lane >= 0 && cfg.road.hazard_lane < cfg.road.lane_count,
          "road.hazard_lane: must be a valid lane index");
  require(cfg.step_length > 0.0, "demand.step_length_s: must be > 0");
  require(cfg.horizon > 0.0 && is_multiple(cfg.horizon, cfg.step_length),
          "demand.horizon_s: must be a positive multiple of the step length");
  require(cfg.demand >= 0.0, "demand.rate_vph: must be >= 0");
  require(cfg.penetration >= 0.0 && cfg.penetration <= 1.0,
          "demand.penetration: must be in [0, 1]");

  const auto& d = cfg.drivers;
  check_dist("drivers.sigma", d.sigma, 0.0, 1.0);
  check_dist("drivers.decel", d.decel, 1e-9, d.emergency_decel);
  check_dist("drivers.accel", d.accel, 1e-9, 1e9);
  check_dist("drivers.speed_factor", d.speed_factor, 1e-9, 1e9);
  require(d.tau > 0.0, "drivers.tau: must be > 0");
  require(d.emergency_decel > 0.0, "drivers.emergency_decel: must be > 0");
  require(d.lc_assertive > 0.0, "drivers.lc_assertive: must be > 0");
  require(d.action_step_length > 0.0 &&
              is_multiple(d.action_step_length, cfg.step_length),
          "drivers.action_step_length: must be a positive multiple of the step "
          "length");
  require(d.max_speed > 0.0, "drivers.max_speed: must be > 0");
  require(d.veh_length > 0.0, "drivers.veh_length: must be > 0");
  require(d.min_gap >= 0.0, "drivers.min_gap: must be >= 0");
  require(d.speed_gain_threshold >= 0.0, "drivers.speed_gain_threshold: must be >= 0");

  const auto& t = cfg.tcs;
  require(t.rhw_range > 0.0, "tcs.rhw_range: must be > 0");
  require(t.reaction_time > 0.0, "tcs.reaction_time: must be > 0");
  require(t.safety_factor > 0.0, "tcs.safety_factor: must be > 0");
  require(t.decel_ability > 0.0, "tcs.decel_ability: must be > 0");
  require(t.scr_factor > 0.0 && t.scr_factor <= 1.0,
          "tcs.scr_factor: must be in (0, 1]");
  require(t.decel_alarm_threshold > 0.0, "tcs.decel_alarm_threshold: must be > 0");
  require(t.alarm_window > 0.0, "tcs.alarm_window_s: must be > 0");
  require(t.cam_silence_ticks >= 1, "tcs.cam_silence_ticks: must be >= 1");
  require(t.gap_control.target_time_headway > 0.0,
          "tcs.gc_time_headway: must be > 0");
  require(t.gap_control.target_space_headway >= 0.0,
          "tcs.gc_space_headway: must be >= 0");
  require(t.gap_control.change_rate > 0.0, "tcs.gc_change_rate: must be > 0");
  require(t.gap_control.max_decel > 0.0, "tcs.gc_max_decel: must be > 0");
  // Nested zone geometry: the EEBL zone must fit inside the RHW range.
  require(eebl_distance(t, cfg.road.speed_limit) <= t.rhw_range,
          "tcs.rhw_range: EEBL distance exceeds the RHW range");

  require(cfg.hazard.trigger_position > 0.0 &&
              cfg.hazard.trigger_position < cfg.road.length,
          "hazard.trigger_position: must lie inside the road");
  require(cfg.hazard.depart_time >= 0.0, "hazard.depart_time: must be >= 0");
  require(cfg.hazard.speed_factor > 0.0, "hazard.speed_factor: must be > 0");

  const auto& s = cfg.ssm;
  require(s.ttc_star > 0.0, "ssm.ttc_star: must be > 0");
  require(s.drac_star > 0.0, "ssm.drac_star: must be > 0");
  require(s.tit_window > 0.0, "ssm.tit_window: must be > 0");
  require(s.dt > 0.0, "ssm.dt: must be > 0");
  require(std::abs(s.dt - cfg.step_length) < 1e-9,
          "ssm.dt: must equal the simulation step length");
  require(s.conflict_range > 0.0, "ssm.conflict_range: must be > 0");
  require(s.dt_bin > 0.0, "ssm.dt_bin: must be > 0");
  require(s.dx_bin > 0.0, "ssm.dx_bin: must be > 0");
}

DriverParams sample_driver(const DriverDistributions& dist, Rng& rng) {
  auto draw = [&](const char* name, const DistSpec& d) {
    if (!d.is_normal) return d.value;
    for (int i = 0; i < 1000000; ++i) {
      const double x = rng.normal(d.mean, d.stddev);
      if (x >= d.min && x <= d.max) return x;
    }
    throw ValidationError(std::string("drivers.") + name +
                          ": clipped normal rejected 10^6 draws");
  };
  DriverParams p;
  p.sigma = draw("sigma", dist.sigma);
  p.decel = draw("decel", dist.decel);
  p.accel = draw("accel", dist.accel);
  p.speed_factor = draw("speed_factor", dist.speed_factor);
  p.tau = dist.tau;
  p.emergency_decel = dist.emergency_decel;
  p.lc_assertive = dist.lc_assertive;
  p.action_step_length = dist.action_step_length;
  p.max_speed = dist.max_speed;
  return p;
}

DriverParams trigger_driver(const DriverDistributions& dist, const HazardPlan& plan) {
  auto center = [](const DistSpec& d) {
    if (!d.is_normal) return d.value;
    return std::min(d.max, std::max(d.min, d.mean));
  };
  DriverParams p;
  p.sigma = 0.0;
  p.decel = center(dist.decel);
  p.accel = center(dist.accel);
  p.speed_factor = plan.speed_factor;
  p.tau = dist.tau;
  p.emergency_decel = dist.emergency_decel;
  p.lc_assertive = dist.lc_assertive;
  p.action_step_length = dist.action_step_length;
  p.max_speed = dist.max_speed;
  return p;
}

}  // namespace rhw
