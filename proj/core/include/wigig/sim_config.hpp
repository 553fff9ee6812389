#ifndef WIGIG_SIM_CONFIG_HPP
#define WIGIG_SIM_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <string>

#include "wigig/channel.hpp"
#include "wigig/policy.hpp"
#include "wigig/predictor.hpp"

namespace wigig {

/// Forecaster hyperparameters and the online-training schedule knobs.
struct PredictorConfig {
  int input_slots = 25;
  int output_slots = 10;
  std::vector<ConvLayerSpec> conv{{16, 5, 1, 2}, {32, 3, 1, 1}};
  std::vector<int> dense{128};
  // The schedule reproduces the slow published learning timescale: the
  // rate ramps linearly over the first lr_warmup_steps global SGD updates
  // (0 = constant), so the error curve is still descending after thousands
  // of slots instead of converging almost immediately on the smooth
  // parametric channel.
  double learning_rate = 3e-6;
  double momentum = 0.9;
  long lr_warmup_steps = 1400000;

  double effective_lr(std::uint64_t steps_done) const {
    if (lr_warmup_steps <= 0) return learning_rate;
    const double frac = static_cast<double>(steps_done + 1) / lr_warmup_steps;
    return learning_rate * std::min(1.0, frac);
  }

  Architecture architecture(int features) const;
};

/// Everything one simulation run depends on. Defaults reproduce the standard
/// evaluation setup: 300 m square room, 1 s slots, 4 APs, 4 PoIs, 3
/// application types, 10 s mean interarrival, 10-1000 Mbps demand,
/// 0.1-2.0 m/s walking speeds, 1-100 s dwell, 200 Mbps handover threshold.
struct SimConfig {
  double room_size_m = 300.0;
  double slot_s = 1.0;
  int num_aps = 4;
  int num_pois = 4;
  int num_app_types = 3;
  double interarrival_mean_s = 10.0;
  double poi_stay_min_s = 1.0;
  double poi_stay_max_s = 100.0;
  int pois_per_user_min = 1;
  int pois_per_user_max = 3;
  double speed_min_mps = 0.1;
  double speed_max_mps = 2.0;
  double demand_min_mbps = 10.0;
  double demand_max_mbps = 1000.0;
  double ul_fraction = 0.1;
  // One handover blanks this much of the slot; covers 802.11ad/ay
  // re-association plus beamforming training.
  double handover_interruption_s = 0.3;

  long total_slots = 20000;
  long warm_up_slots = 5000;
  std::uint64_t seed = 1;

  PolicyKind policy{Strategy::Predictive, Mode::Greedy, 200.0};
  ChannelParams channel;
  RateTable rate_table = RateTable::defaults();
  PredictorConfig predictor;

  bool emit_tuples = false;
  std::string run_id;  // defaults to "run-<seed>" when empty

  int features() const { return 2 + num_aps; }
  std::string effective_run_id() const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

}  // namespace wigig

#endif  // WIGIG_SIM_CONFIG_HPP
