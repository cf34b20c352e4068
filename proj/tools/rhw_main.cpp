#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rhw/csv.hpp"
#include "rhw/sim.hpp"
#include "rhw/sweep.hpp"

namespace {

rhw::SimConfig load_config(const std::string& path) {
  if (path.empty()) {
    rhw::SimConfig cfg;
    rhw::validate(cfg);
    return cfg;
  }
  return rhw::parse_config(path);
}

int cmd_run(const std::string& config_path, long seed, const std::string& out_dir,
            bool traj) {
  rhw::SimConfig cfg = load_config(config_path);
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (traj) cfg.output.trajectory = true;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw rhw::RunError("cannot create output directory: " + out_dir);

  std::ofstream traj_file;
  std::ostream* traj_sink = nullptr;
  if (cfg.output.trajectory) {
    traj_file.open(out_dir + "/trajectory.csv", std::ios::binary);
    if (!traj_file) {
      throw rhw::RunError("cannot write output file: " + out_dir + "/trajectory.csv");
    }
    traj_sink = &traj_file;
  }

  const rhw::RunResult result = rhw::Simulation::run(cfg, traj_sink);
  rhw::emit_outputs(result, cfg, 0, out_dir);

  const auto& rep = result.report;
  std::printf("inserted=%ld exited=%ld crashes=%ld flow=%.1f veh/h\n",
              result.inserted, result.exited, rep.crash_count, rep.flow);
  std::printf("tit=%.15g min_ttc=%.15g ttc_events=%ld drac_events=%ld\n", rep.tit,
              rep.min_ttc, rep.critical_ttc_events, rep.critical_drac_events);
  if (rep.first_crash_time) {
    std::printf("first_crash_time=%s\n", rhw::fmt6(*rep.first_crash_time).c_str());
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& seeds_csv,
              const std::string& out_dir, const std::string& grid, int threads) {
  rhw::SimConfig base = load_config(config_path);
  if (grid != "table4") {
    throw rhw::ValidationError("unknown grid '" + grid + "' (expected: table4)");
  }
  std::vector<std::uint64_t> seeds;
  std::string tok;
  std::istringstream ss(seeds_csv);
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      seeds.push_back(static_cast<std::uint64_t>(std::stoll(tok)));
    } catch (const std::exception&) {
      throw rhw::ValidationError("bad seed '" + tok + "' in --seeds");
    }
  }
  if (seeds.empty()) throw rhw::ValidationError("--seeds: need at least one seed");

  const auto specs = rhw::table4_grid();
  const rhw::SweepResult result = rhw::run_sweep(base, specs, seeds, threads);
  rhw::write_sweep_outputs(result, out_dir);

  long failed = 0;
  for (const auto& r : result.runs) failed += r.failed ? 1 : 0;
  std::printf("sweep: %zu runs (%zu scenarios x %zu seeds), %ld failed\n",
              result.runs.size(), specs.size(), seeds.size(), failed);
  for (const auto& mrow : result.means) {
    std::printf("scenario %2d pen=%.2f scr=%.2f: tit=%.2f crashes=%.2f flow=%.0f\n",
                mrow.scenario_id, mrow.penetration, mrow.scr_factor, mrow.tit,
                mrow.crashes, mrow.flow_vph);
  }
  return failed == 0 ? 0 : 2;
}

int cmd_ssm(const std::string& traj_path, double ttc_star, double drac_star,
            double window, double crash_time, bool have_crash_time, double dt,
            double veh_length, double range) {
  rhw::RecomputeOptions opt;
  opt.ssm.ttc_star = ttc_star;
  opt.ssm.drac_star = drac_star;
  opt.ssm.tit_window = window;
  opt.ssm.dt = dt;
  opt.ssm.conflict_range = range;
  opt.veh_length = veh_length;
  if (have_crash_time) opt.crash_time = crash_time;

  const rhw::TrajectoryMetrics m = rhw::recompute_from_trajectory(traj_path, opt);
  std::printf("rows=%ld\n", m.rows);
  std::printf("tit=%.15g\n", m.tit);
  std::printf("min_ttc=%.15g\n", m.min_ttc);
  std::printf("ttc_events=%ld\n", m.ttc_events);
  std::printf("drac_events=%ld\n", m.drac_events);
  std::printf("crash_count=%ld\n", m.crash_count);
  if (m.first_crash_time) {
    std::printf("first_crash_time=%s\n", rhw::fmt6(*m.first_crash_time).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"V2I road-hazard-warning freeway microsimulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  long seed = -1;
  bool traj = false;
  auto* run = app.add_subcommand("run", "simulate one configured run");
  run->add_option("--config", config_path, "config file (defaults when omitted)");
  run->add_option("--seed", seed, "master seed override");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_flag("--traj", traj, "write the per-tick trajectory CSV");

  std::string sweep_config, seeds_csv, sweep_out = "out", grid = "table4";
  int threads = 0;
  auto* sweep = app.add_subcommand("sweep", "run the scenario grid over seeds");
  sweep->add_option("--config", sweep_config, "base config file");
  sweep->add_option("--seeds", seeds_csv, "comma-separated seed list")->required();
  sweep->add_option("--out", sweep_out, "output directory")->required();
  sweep->add_option("--grid", grid, "scenario grid name (table4)");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

  std::string traj_path;
  double ttc_star = 1.5, drac_star = 3.35, window = 15.0, crash_time = 0.0;
  double dt = 0.1, veh_length = 5.0, range = 250.0;
  auto* ssm = app.add_subcommand("ssm", "recompute safety metrics from a trajectory");
  ssm->add_option("--traj", traj_path, "trajectory CSV path")->required();
  ssm->add_option("--ttc-star", ttc_star, "critical TTC threshold, s");
  ssm->add_option("--drac-star", drac_star, "critical DRAC threshold, m/s^2");
  ssm->add_option("--window", window, "TIT integration window, s");
  auto* ct = ssm->add_option("--crash-time", crash_time,
                             "TIT anchor time (auto-detected when omitted)");
  ssm->add_option("--dt", dt, "trajectory sampling interval, s");
  ssm->add_option("--veh-length", veh_length, "vehicle length, m");
  ssm->add_option("--range", range, "conflict sampling range, m");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(config_path, seed, out_dir, traj);
    if (sweep->parsed()) return cmd_sweep(sweep_config, seeds_csv, sweep_out, grid, threads);
    if (ssm->parsed()) {
      return cmd_ssm(traj_path, ttc_star, drac_star, window, crash_time,
                     ct->count() > 0, dt, veh_length, range);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const rhw::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
