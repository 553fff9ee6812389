#ifndef WIGIG_POLICY_HPP
#define WIGIG_POLICY_HPP

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "wigig/channel.hpp"

namespace wigig {

enum class Strategy { Predictive, Reactive };
enum class Mode { Greedy, Conservative };

std::string to_string(Strategy s);
std::string to_string(Mode m);
Strategy strategy_from_string(const std::string& s);
Mode mode_from_string(const std::string& s);

/// Which association rule runs and how reluctant it is to switch APs.
struct PolicyKind {
  Strategy strategy = Strategy::Predictive;
  Mode mode = Mode::Greedy;
  double threshold_mbps = 200.0;  // used by conservative variants

  /// Greedy variants switch on any strict improvement.
  double effective_threshold() const { return mode == Mode::Greedy ? 0.0 : threshold_mbps; }
  std::string name() const { return to_string(strategy) + "-" + to_string(mode); }
};

/// Per-user forecast of the offered PHY rate on every AP over the decision
/// horizon: ap_rates[ap][k], k over 1..horizon slots. Reactive policies use a
/// horizon of one built from the current RSSI sample.
struct UserForecast {
  int user_id = -1;
  std::vector<std::vector<double>> ap_rates;
};

/// One slot's user->AP decision.
struct AssociationPlan {
  std::map<int, int> assignment;  // only associated users appear
  std::vector<int> ap_load;       // multiset counts of `assignment`
  std::set<int> handovers;        // users whose AP changed (old and new both defined)
};

/// Mean offered rate over the horizon if the user joined an AP that already
/// has `load` users this slot.
double score_ap(std::span<const double> rates_mbps, int load);

/// Sequential greedy pass: users in ascending user_id, each taking the
/// highest-scoring AP (lowest ap_id on ties) against the loads accumulated so
/// far, switching only when the gain over the current AP exceeds the
/// threshold. Users whose forecast is all-zero end up unassociated.
AssociationPlan associate(const std::vector<UserForecast>& forecasts,
                          const std::map<int, int>& current_assoc,
                          const PolicyKind& kind, int num_aps);

/// Horizon-1 forecast from the current slot's RSSI row (one entry per AP).
std::vector<std::vector<double>> reactive_forecast(std::span<const double> rssi_row,
                                                   const RateTable& table);

}  // namespace wigig

#endif  // WIGIG_POLICY_HPP
