#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rhw/sweep.hpp"

using namespace rhw;

namespace {

SimConfig tiny_config() {
  SimConfig cfg;
  cfg.horizon = 60.0;
  cfg.demand = 2400.0;
  cfg.hazard.depart_time = 5.0;
  cfg.hazard.trigger_position = 700.0;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("the scenario grid reproduces the 17-row structure") {
  const auto specs = table4_grid();
  REQUIRE(specs.size() == 17);
  CHECK(specs[0].scenario_id == 1);
  CHECK(specs[0].penetration == 0.0);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CHECK(specs[i].scenario_id == static_cast<int>(i) + 1);
  }
  const double pens[] = {0.25, 0.5, 0.75, 1.0};
  const double facs[] = {0.5, 0.75, 0.85, 1.0};
  for (int p = 0; p < 4; ++p) {
    for (int f = 0; f < 4; ++f) {
      const auto& s = specs[static_cast<std::size_t>(1 + p * 4 + f)];
      CHECK(s.penetration == pens[p]);
      CHECK(s.scr_factor == facs[f]);
    }
  }
  // the row the headline comparison uses: full penetration, halved speed
  CHECK(specs[13].scenario_id == 14);
  CHECK(specs[13].penetration == 1.0);
  CHECK(specs[13].scr_factor == 0.5);
}

TEST_CASE("sweep rows, means and determinism") {
  SimConfig base = tiny_config();
  std::vector<ScenarioSpec> specs = {{1, 0.0, 1.0}, {14, 1.0, 0.5}};
  const std::vector<std::uint64_t> seeds = {7, 8, 9};

  const SweepResult a = run_sweep(base, specs, seeds, 2);
  REQUIRE(a.runs.size() == 6);
  REQUIRE(a.means.size() == 2);

  for (std::size_t s = 0; s < specs.size(); ++s) {
    double tit = 0.0, crashes = 0.0, flow = 0.0;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const auto& r = a.runs[s * seeds.size() + k];
      CHECK(r.scenario_id == specs[s].scenario_id);
      CHECK(r.seed == static_cast<long>(seeds[k]));
      CHECK_FALSE(r.failed);
      tit += r.tit;
      crashes += r.crashes;
      flow += r.flow_vph;
    }
    CHECK(a.means[s].tit == doctest::Approx(tit / 3.0));
    CHECK(a.means[s].crashes == doctest::Approx(crashes / 3.0));
    CHECK(a.means[s].flow_vph == doctest::Approx(flow / 3.0));
    CHECK(a.means[s].seed == -1);
  }

  // identical inputs give identical summary bytes, independent of threads
  const SweepResult b = run_sweep(base, specs, seeds, 1);
  std::ostringstream csv_a, csv_b;
  write_summary_csv(csv_a, a.runs);
  write_summary_csv(csv_b, b.runs);
  CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("a failing run is recorded and the sweep continues") {
  SimConfig base = tiny_config();
  std::vector<ScenarioSpec> specs = {{1, 0.0, 1.0}, {2, 0.25, -1.0}};  // bad factor
  const SweepResult r = run_sweep(base, specs, {5}, 1);
  REQUIRE(r.runs.size() == 2);
  CHECK_FALSE(r.runs[0].failed);
  CHECK(r.runs[1].failed);
  CHECK(r.runs[1].tit == -1.0);
  CHECK(r.means[1].failed);
}

TEST_CASE("emitted files follow the schemas") {
  SimConfig cfg = tiny_config();
  cfg.seed = 3;
  const std::string dir = "test_sweep_out";
  std::filesystem::remove_all(dir);

  const RunResult result = Simulation::run(cfg);
  emit_outputs(result, cfg, 0, dir);

  CHECK_FALSE(std::filesystem::exists(dir + "/trajectory.csv"));
  const std::string summary = slurp(dir + "/summary.csv");
  CHECK(summary.rfind("scenario_id,penetration,scr_factor,seed,tit,crashes,"
                      "flow_vph,min_ttc_s,ttc_events,drac_events\n",
                      0) == 0);
  CHECK(summary.back() == '\n');

  const std::string events = slurp(dir + "/events.csv");
  long crash_rows = 0;
  std::istringstream es(events);
  std::string line;
  while (std::getline(es, line)) crash_rows += line.find(",crash,") != std::string::npos;
  CHECK(crash_rows == result.report.crash_count);

  // space-time rows stay within the grid bound
  const std::string st = slurp(dir + "/spacetime.csv");
  long st_rows = -1;  // header
  std::istringstream ss(st);
  while (std::getline(ss, line)) ++st_rows;
  const long bound = static_cast<long>(std::ceil(cfg.horizon / cfg.ssm.dt_bin)) *
                     static_cast<long>(std::ceil(cfg.road.length / cfg.ssm.dx_bin));
  CHECK(st_rows <= bound);
  CHECK(st_rows > 0);

  std::filesystem::remove_all(dir);
}

TEST_CASE("trajectory recomputation matches the in-run metrics") {
  SimConfig cfg = tiny_config();
  cfg.horizon = 90.0;
  cfg.demand = 3000.0;
  cfg.seed = 11;

  const std::string path = "test_traj_roundtrip.csv";
  {
    std::ofstream traj(path, std::ios::binary);
    REQUIRE(traj);
    const RunResult result = Simulation::run(cfg, &traj);
    traj.close();

    RecomputeOptions opt;
    opt.ssm = cfg.ssm;
    opt.veh_length = cfg.drivers.veh_length;
    const TrajectoryMetrics m = recompute_from_trajectory(path, opt);

    CHECK(m.rows > 0);
    CHECK(m.tit == result.report.tit);  // bit-exact by construction
    CHECK(m.min_ttc == result.report.min_ttc);
    CHECK(m.ttc_events == result.report.critical_ttc_events);
    CHECK(m.drac_events == result.report.critical_drac_events);
    CHECK(m.crash_count == result.report.crash_count);
    if (result.report.first_crash_time) {
      REQUIRE(m.first_crash_time.has_value());
      CHECK(*m.first_crash_time ==
            doctest::Approx(*result.report.first_crash_time).epsilon(1e-9));
    }
  }
  std::filesystem::remove(path);
}
