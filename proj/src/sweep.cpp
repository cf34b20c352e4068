#include "rhw/sweep.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

namespace rhw {

std::vector<ScenarioSpec> table4_grid() {
  std::vector<ScenarioSpec> specs;
  specs.push_back({1, 0.0, 1.0});
  const double penetrations[] = {0.25, 0.5, 0.75, 1.0};
  const double factors[] = {0.5, 0.75, 0.85, 1.0};
  int id = 2;
  for (double p : penetrations) {
    for (double f : factors) specs.push_back({id++, p, f});
  }
  return specs;
}

SimConfig apply_scenario(const SimConfig& base, const ScenarioSpec& spec,
                         std::uint64_t seed) {
  SimConfig cfg = base;
  cfg.penetration = spec.penetration;
  cfg.tcs.scr_factor = spec.scr_factor;
  cfg.seed = seed;
  cfg.output.trajectory = false;
  return cfg;
}

SweepResult run_sweep(const SimConfig& base, const std::vector<ScenarioSpec>& specs,
                      const std::vector<std::uint64_t>& seeds, int threads) {
  SweepResult out;
  const std::size_t total = specs.size() * seeds.size();
  out.runs.assign(total, SummaryRow{});

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const ScenarioSpec& spec = specs[i / seeds.size()];
      const std::uint64_t seed = seeds[i % seeds.size()];
      SummaryRow row;
      row.scenario_id = spec.scenario_id;
      row.penetration = spec.penetration;
      row.scr_factor = spec.scr_factor;
      row.seed = static_cast<long>(seed);
      try {
        const SimConfig cfg = apply_scenario(base, spec, seed);
        const RunResult result = Simulation::run(cfg);
        row = summary_of(result, cfg, spec.scenario_id);
      } catch (const std::exception&) {
        row.failed = true;
        row.tit = -1.0;
        row.crashes = -1.0;
        row.flow_vph = -1.0;
        row.min_ttc = -1.0;
        row.ttc_events = -1.0;
        row.drac_events = -1.0;
      }
      out.runs[i] = row;
    }
  };

  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  n = std::min<int>(n, static_cast<int>(total));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t s = 0; s < specs.size(); ++s) {
    SummaryRow mean;
    mean.scenario_id = specs[s].scenario_id;
    mean.penetration = specs[s].penetration;
    mean.scr_factor = specs[s].scr_factor;
    mean.seed = -1;
    long ok = 0;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const SummaryRow& r = out.runs[s * seeds.size() + k];
      if (r.failed) continue;
      mean.tit += r.tit;
      mean.crashes += r.crashes;
      mean.flow_vph += r.flow_vph;
      mean.min_ttc += r.min_ttc;
      mean.ttc_events += r.ttc_events;
      mean.drac_events += r.drac_events;
      ++ok;
    }
    if (ok > 0) {
      mean.tit /= ok;
      mean.crashes /= ok;
      mean.flow_vph /= ok;
      mean.min_ttc /= ok;
      mean.ttc_events /= ok;
      mean.drac_events /= ok;
    } else {
      mean.failed = true;
    }
    out.means.push_back(mean);
  }
  return out;
}

void write_sweep_outputs(const SweepResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RunError("cannot create output directory: " + dir);
  std::ofstream runs(dir + "/summary.csv", std::ios::binary);
  if (!runs) throw RunError("cannot write output file: " + dir + "/summary.csv");
  write_summary_csv(runs, result.runs);
  std::ofstream means(dir + "/summary_means.csv", std::ios::binary);
  if (!means) {
    throw RunError("cannot write output file: " + dir + "/summary_means.csv");
  }
  write_summary_csv(means, result.means);
}

}  // namespace rhw
