#include "wigig/policy.hpp"

#include <stdexcept>

namespace wigig {

std::string to_string(Strategy s) { return s == Strategy::Predictive ? "predictive" : "reactive"; }
std::string to_string(Mode m) { return m == Mode::Greedy ? "greedy" : "conservative"; }

Strategy strategy_from_string(const std::string& s) {
  if (s == "predictive") return Strategy::Predictive;
  if (s == "reactive") return Strategy::Reactive;
  throw std::invalid_argument("policy must be 'predictive' or 'reactive', got '" + s + "'");
}

Mode mode_from_string(const std::string& s) {
  if (s == "greedy") return Mode::Greedy;
  if (s == "conservative") return Mode::Conservative;
  throw std::invalid_argument("mode must be 'greedy' or 'conservative', got '" + s + "'");
}

double score_ap(std::span<const double> rates_mbps, int load) {
  if (load < 0) throw std::invalid_argument("score_ap: negative load");
  if (rates_mbps.empty()) throw std::invalid_argument("score_ap: empty forecast");
  double sum = 0.0;
  for (double r : rates_mbps) sum += r;
  return sum / rates_mbps.size() / (load + 1);
}

AssociationPlan associate(const std::vector<UserForecast>& forecasts,
                          const std::map<int, int>& current_assoc, const PolicyKind& kind,
                          int num_aps) {
  if (num_aps < 1) throw std::invalid_argument("associate: num_aps must be >= 1");
  const double threshold = kind.effective_threshold();

  AssociationPlan plan;
  plan.ap_load.assign(num_aps, 0);

  int last_id = -1;
  std::vector<double> scores(num_aps);
  for (const auto& fc : forecasts) {
    if (fc.user_id <= last_id)
      throw std::invalid_argument("associate: forecasts must be sorted by user_id");
    last_id = fc.user_id;
    if (static_cast<int>(fc.ap_rates.size()) != num_aps)
      throw std::invalid_argument("associate: forecast for user " + std::to_string(fc.user_id) +
                                  " does not cover every AP");

    int best = 0;
    for (int j = 0; j < num_aps; ++j) {
      scores[j] = score_ap(fc.ap_rates[j], plan.ap_load[j]);
      if (scores[j] > scores[best]) best = j;  // ties keep the lowest ap_id
    }

    // Out of coverage of every AP: stays unassociated, still produces telemetry.
    if (scores[best] <= 0.0) continue;

    const auto cur = current_assoc.find(fc.user_id);
    int chosen;
    if (cur == current_assoc.end()) {
      chosen = best;  // first association is free
    } else if (scores[best] - scores[cur->second] > threshold) {
      chosen = best;
      plan.handovers.insert(fc.user_id);
    } else {
      chosen = cur->second;
    }
    plan.assignment[fc.user_id] = chosen;
    plan.ap_load[chosen] += 1;
  }
  return plan;
}

std::vector<std::vector<double>> reactive_forecast(std::span<const double> rssi_row,
                                                   const RateTable& table) {
  std::vector<std::vector<double>> rates(rssi_row.size());
  for (std::size_t j = 0; j < rssi_row.size(); ++j) rates[j] = {phy_rate(rssi_row[j], table)};
  return rates;
}

}  // namespace wigig
