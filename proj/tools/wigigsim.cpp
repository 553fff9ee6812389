// Command-line front end: single runs, experiment sweeps, byte-exact replay
// verification and checkpoint inspection. CSV files are the interface to
// plotting tools; every result directory carries the fully resolved config
// that produced it.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "wigig/checkpoint.hpp"
#include "wigig/config.hpp"
#include "wigig/csv.hpp"
#include "wigig/engine.hpp"

namespace fs = std::filesystem;
using namespace wigig;

namespace {

struct FlagValues {
  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common_flags(CLI::App* cmd, FlagValues& fv) {
  auto bind = [cmd, &fv](const std::string& flag, const std::string& key,
                         const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&fv, key](const std::string& v) { fv.overrides.emplace_back(key, v); }, help);
  };
  cmd->add_option("--config", fv.config_path, "config file (sectioned key = value)");
  bind("--seed", "seed", "RNG seed");
  bind("--policy", "policy", "predictive|reactive");
  bind("--mode", "mode", "greedy|conservative");
  bind("--threshold-mbps", "threshold_mbps", "handover gain threshold (conservative mode)");
  bind("--interarrival-s", "interarrival_mean_s", "mean user interarrival time");
  bind("--slots", "total_slots", "slots to simulate");
  bind("--warm-up-slots", "warm_up_slots", "slots before predictions steer association");
  bind("--out-dir", "out_dir", "output directory");
  bind("--checkpoint-in", "checkpoint_in", "model checkpoint to start from");
  bind("--checkpoint-out", "checkpoint_out", "where to save the trained model");
}

ExperimentSpec resolve_spec(const FlagValues& fv) {
  if (fv.config_path) return parse_config_file(*fv.config_path, fv.overrides);
  return parse_config_text("", fv.overrides);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

// Executes a resolved spec into `dir`: a single run (metrics.csv and friends)
// when there is no grid, otherwise a sweep (summary.csv + aggregate.csv).
void execute_spec(const ExperimentSpec& spec_in, const fs::path& dir, bool quiet) {
  ExperimentSpec spec = spec_in;
  fs::create_directories(dir);
  write_file(dir / "config.resolved", render_config(spec));

  const bool single = spec.axes.empty() && spec.seeds.size() == 1;
  if (single) {
    SimConfig cfg = spec.base;
    cfg.seed = spec.seeds[0];
    cfg.validate();

    std::optional<Scenario> world;
    if (!spec.scenario_in.empty()) world = load_scenario(spec.scenario_in);

    std::optional<ModelState> carry;
    if (!spec.checkpoint_in.empty()) carry = load_checkpoint(spec.checkpoint_in);

    std::optional<TupleLogWriter> tuples;
    SlotObserver observer;
    if (cfg.emit_tuples) {
      tuples.emplace((dir / "tuples.csv").string(), cfg.effective_run_id(), cfg.num_aps);
      observer = tuples->observer();
    }

    RunResult res = run_simulation(cfg, std::move(world), carry ? &*carry : nullptr,
                                   std::move(observer));
    write_metrics_csv(res.series, (dir / "metrics.csv").string());
    save_scenario(res.scenario, (dir / "scenario.txt").string());

    CellResult row;
    row.cell_key = "-";
    row.seed = cfg.seed;
    row.ok = true;
    row.cfg = cfg;
    row.summary = res.summary;
    write_summary_csv({row}, (dir / "summary.csv").string());

    if (res.model) {
      const fs::path ckpt =
          spec.checkpoint_out.empty() ? dir / "checkpoint.bin" : fs::path(spec.checkpoint_out);
      save_checkpoint(*res.model, ckpt.string());
    }

    if (!quiet) {
      std::printf("run %s: %ld slots, policy %s\n", cfg.effective_run_id().c_str(),
                  cfg.total_slots, cfg.policy.name().c_str());
      std::printf("  mean throughput (all users, post warm-up): %.1f Mbps\n",
                  res.summary.mean_tput_all_mbps);
      std::printf("  mean throughput (connected users):          %.1f Mbps\n",
                  res.summary.mean_tput_connected_mbps);
      std::printf("  total handovers: %ld (post warm-up: %ld)\n", res.summary.total_handovers,
                  res.summary.post_warmup_handovers);
      if (res.summary.final_window_mae_db)
        std::printf("  prediction MAE, final window: %.3f dB\n", *res.summary.final_window_mae_db);
      std::printf("  outputs in %s\n", dir.string().c_str());
    }
    return;
  }

  auto rows = run_experiment(spec, quiet ? std::function<void(const CellResult&)>{}
                                         : [](const CellResult& r) {
                                             std::printf("  cell %s seed %llu: %s\n",
                                                         r.cell_key.c_str(),
                                                         (unsigned long long)r.seed,
                                                         r.ok ? "ok" : r.error.c_str());
                                             std::fflush(stdout);
                                           });
  write_summary_csv(rows, (dir / "summary.csv").string());
  write_aggregate_csv(aggregate_cells(rows), (dir / "aggregate.csv").string());
  if (!quiet) {
    int failed = 0;
    for (const auto& r : rows)
      if (!r.ok) ++failed;
    std::printf("sweep: %zu rows (%d failed), outputs in %s\n", rows.size(), failed,
                dir.string().c_str());
  }
}

int do_replay_check(const std::string& dir_arg) {
  const fs::path dir(dir_arg);
  const fs::path resolved = dir / "config.resolved";
  if (!fs::exists(resolved)) {
    std::fprintf(stderr, "replay-check: %s not found\n", resolved.string().c_str());
    return 2;
  }
  ExperimentSpec spec = parse_config_file(resolved.string());
  spec.out_dir = "";

  const fs::path replay_dir = dir / ".replay";
  fs::remove_all(replay_dir);
  execute_spec(spec, replay_dir, /*quiet=*/true);

  static const char* kFiles[] = {"metrics.csv",  "summary.csv",  "aggregate.csv",
                                 "tuples.csv",   "scenario.txt", "checkpoint.bin"};
  int mismatches = 0;
  for (const char* name : kFiles) {
    const fs::path original = dir / name;
    if (!fs::exists(original)) continue;
    const fs::path fresh = replay_dir / name;
    if (!fs::exists(fresh)) {
      std::printf("replay-check: %s missing from replay output\n", name);
      ++mismatches;
      continue;
    }
    if (read_file(original) != read_file(fresh)) {
      std::printf("replay-check: %s differs\n", name);
      ++mismatches;
    }
  }
  fs::remove_all(replay_dir);
  if (mismatches == 0) {
    std::printf("replay-check: OK (%s reproduces byte-identically)\n", dir.string().c_str());
    return 0;
  }
  std::printf("replay-check: FAILED (%d file(s) differ)\n", mismatches);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wigigsim - multi-AP 60 GHz simulator with prediction-driven handover"};
  app.require_subcommand(1);

  FlagValues run_fv;
  auto* run_cmd = app.add_subcommand("run", "run a single simulation");
  add_common_flags(run_cmd, run_fv);

  FlagValues sweep_fv;
  std::optional<std::string> sweep_seeds;
  std::optional<std::string> sweep_jobs;
  auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment grid");
  add_common_flags(sweep_cmd, sweep_fv);
  sweep_cmd->add_option("--seeds", sweep_seeds, "comma-separated seed list");
  sweep_cmd->add_option("--jobs", sweep_jobs, "parallel seed chains (default: cores)");

  std::string replay_dir;
  auto* replay_cmd = app.add_subcommand("replay-check",
                                        "re-run a result directory and diff outputs byte-wise");
  replay_cmd->add_option("dir", replay_dir, "result directory")->required();

  std::string model_path;
  auto* inspect_cmd = app.add_subcommand("inspect-model", "print a checkpoint summary");
  inspect_cmd->add_option("file", model_path, "checkpoint file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      ExperimentSpec spec = resolve_spec(run_fv);
      if (spec.seeds.size() != 1)
        throw std::invalid_argument("run takes a single seed; use sweep for seed lists");
      if (!spec.axes.empty())
        throw std::invalid_argument("config defines a [sweep]; use the sweep subcommand");
      const fs::path dir = spec.out_dir.empty() ? "out" : spec.out_dir;
      std::fputs(render_config(spec).c_str(), stdout);
      execute_spec(spec, dir, /*quiet=*/false);
      return 0;
    }
    if (sweep_cmd->parsed()) {
      if (sweep_seeds) sweep_fv.overrides.emplace_back("seeds", *sweep_seeds);
      if (sweep_jobs) sweep_fv.overrides.emplace_back("jobs", *sweep_jobs);
      ExperimentSpec spec = resolve_spec(sweep_fv);
      const fs::path dir = spec.out_dir.empty() ? "out" : spec.out_dir;
      std::fputs(render_config(spec).c_str(), stdout);
      execute_spec(spec, dir, /*quiet=*/false);
      return 0;
    }
    if (replay_cmd->parsed()) return do_replay_check(replay_dir);
    if (inspect_cmd->parsed()) {
      std::fputs(checkpoint_summary(load_checkpoint(model_path)).c_str(), stdout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
