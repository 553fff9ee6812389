#ifndef WIGIG_ENGINE_HPP
#define WIGIG_ENGINE_HPP

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wigig/checkpoint.hpp"
#include "wigig/policy.hpp"
#include "wigig/predictor.hpp"
#include "wigig/scenario.hpp"
#include "wigig/sim_config.hpp"
#include "wigig/telemetry.hpp"

namespace wigig {

/// One row of metrics.csv.
struct MetricsRecord {
  long slot = 0;
  int active_users = 0;
  int connected_users = 0;
  double mean_tput_all_mbps = 0.0;        // disconnected users count as zero
  double mean_tput_connected_mbps = 0.0;  // over associated users only
  int handovers = 0;
  long cumulative_handovers = 0;
  std::optional<double> prediction_mae_db;  // over predictions graded this slot
  std::optional<double> training_loss;      // normalized units
};

/// Detailed per-slot state handed to an observer; used by the tuple log and
/// by invariant-checking tests.
struct UserSlotAudit {
  int user_id = -1;
  int app_id = -1;
  Phase phase = Phase::Moving;
  Vec2 position;
  std::optional<int> dwelling_poi;
  std::vector<int> itinerary;
  std::optional<int> ap;
  bool handover = false;
  double phy_rate_mbps = 0.0;
  double share_mbps = 0.0;
  double achieved_dl_mbps = 0.0;
  double achieved_ul_mbps = 0.0;
  double dl_demand_mbps = 0.0;
  double ul_demand_mbps = 0.0;
  std::vector<double> rssi_dbm;
  std::optional<Matrix> prediction;  // fresh forecast made this slot, if any
};

struct SlotAudit {
  long slot = 0;
  std::vector<UserSlotAudit> users;     // active users, ascending user_id
  std::vector<int> ap_load;
  std::vector<int> departed_user_ids;  // users retired at the end of this slot
};

using SlotObserver = std::function<void(const SlotAudit&)>;

/// Slot-by-slot simulation: arrivals, mobility, RSSI sampling, prediction,
/// association, throughput realization, telemetry, online training,
/// prediction grading, retirement. Single-threaded and deterministic for a
/// fixed (config, seed); the world RNG stream never depends on the policy,
/// so matched seeds give identical trajectories across policies.
class Engine {
 public:
  explicit Engine(const SimConfig& cfg, std::optional<Scenario> world = std::nullopt,
                  const ModelState* carry_in = nullptr);

  MetricsRecord run_slot();

  void set_observer(SlotObserver obs) { observer_ = std::move(obs); }

  long slot() const { return slot_; }
  const Scenario& scenario() const { return scen_; }
  const SimConfig& config() const { return cfg_; }
  bool has_model() const { return net_.has_value(); }
  ModelState model_state() const;  // throws if the policy has no model

 private:
  struct UserRuntime {
    UserAgent agent;
    History history;
    std::deque<Prediction> pending;
  };

  SimConfig cfg_;
  Scenario scen_;
  Rng world_rng_;
  long slot_ = 0;
  int next_user_id_ = 0;
  double next_arrival_time_ = 0.0;
  std::vector<UserRuntime> users_;  // ascending user_id
  NormStats stats_;
  std::optional<ConvNet> net_;
  Scratch scratch_;
  long cumulative_handovers_ = 0;
  SlotObserver observer_;
};

/// Post-warm-up aggregates of one run.
struct RunSummary {
  double mean_tput_all_mbps = 0.0;
  double mean_tput_connected_mbps = 0.0;
  long total_handovers = 0;
  long post_warmup_handovers = 0;
  std::optional<double> final_window_mae_db;  // over the last tenth of slots
  std::optional<double> final_window_loss;
  long slots = 0;
  double peak_active_users = 0.0;
};

struct RunResult {
  std::vector<MetricsRecord> series;
  RunSummary summary;
  Scenario scenario;
  std::optional<ModelState> model;  // predictive policies only
};

RunSummary summarize(const std::vector<MetricsRecord>& series, long warm_up_slots);

/// Runs total_slots slots. `carry_in`, when given, seeds the model and
/// normalization state (continued training).
RunResult run_simulation(const SimConfig& cfg, std::optional<Scenario> world = std::nullopt,
                         const ModelState* carry_in = nullptr, SlotObserver observer = {});

/// One sweep axis: a config key (as accepted by the config file) and the
/// values it takes.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

struct ExperimentSpec {
  SimConfig base;
  std::vector<std::uint64_t> seeds{1};
  std::vector<SweepAxis> axes;
  std::string out_dir;
  std::string checkpoint_in;
  std::string checkpoint_out;
  std::string scenario_in;
  int jobs = 0;  // 0 = hardware concurrency
};

struct CellResult {
  std::string cell_key;  // "key=value;..." or "-" when no sweep
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  SimConfig cfg;
  RunSummary summary;
};

/// Runs every (cell, seed) combination. Seeds run in parallel; within one
/// seed the cells run in order with the model carried forward for predictive
/// policies. Per-cell failures are reported in the row, not thrown.
std::vector<CellResult> run_experiment(
    const ExperimentSpec& spec,
    const std::function<void(const CellResult&)>& on_cell = {});

/// Per-cell mean/stddev across seeds.
struct CellAggregate {
  std::string cell_key;
  int n_seeds = 0;
  double tput_all_mean = 0.0, tput_all_std = 0.0;
  double tput_connected_mean = 0.0, tput_connected_std = 0.0;
  double handovers_mean = 0.0, handovers_std = 0.0;
  std::optional<double> mae_mean, mae_std;
};

std::vector<CellAggregate> aggregate_cells(const std::vector<CellResult>& rows);

}  // namespace wigig

#endif  // WIGIG_ENGINE_HPP
