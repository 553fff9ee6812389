#include "wigig/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wigig/scenario.hpp"

namespace wigig {

void ChannelParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(eirp_dbm)) throw std::invalid_argument("channel.eirp_dbm must be finite");
  if (!finite(rx_gain_dbi)) throw std::invalid_argument("channel.rx_gain_dbi must be finite");
  if (!finite(pl0_db)) throw std::invalid_argument("channel.pl0_db must be finite");
  if (!finite(path_loss_exp) || path_loss_exp <= 0)
    throw std::invalid_argument("channel.path_loss_exp must be positive");
  if (!finite(oxygen_db_per_m) || oxygen_db_per_m < 0)
    throw std::invalid_argument("channel.oxygen_db_per_m must be non-negative");
  if (!finite(noise_sigma_db) || noise_sigma_db < 0)
    throw std::invalid_argument("channel.noise_sigma_db must be non-negative");
  if (!finite(sensitivity_dbm)) throw std::invalid_argument("channel.sensitivity_dbm must be finite");
}

RateTable::RateTable(std::vector<RateTier> tiers) : tiers_(std::move(tiers)) {
  if (tiers_.empty()) throw std::invalid_argument("rate_table.tiers must not be empty");
  for (std::size_t i = 0; i < tiers_.size(); ++i) {
    if (!std::isfinite(tiers_[i].rssi_threshold_dbm) || !std::isfinite(tiers_[i].rate_mbps) ||
        tiers_[i].rate_mbps <= 0)
      throw std::invalid_argument("rate_table.tiers entries must be finite with positive rates");
    if (i > 0) {
      if (tiers_[i].rssi_threshold_dbm >= tiers_[i - 1].rssi_threshold_dbm)
        throw std::invalid_argument("rate_table.tiers thresholds must be strictly decreasing");
      if (tiers_[i].rate_mbps >= tiers_[i - 1].rate_mbps)
        throw std::invalid_argument("rate_table.tiers rates must be strictly decreasing");
    }
  }
}

double RateTable::rate_for(double rssi_dbm) const {
  for (const auto& t : tiers_)
    if (rssi_dbm >= t.rssi_threshold_dbm) return t.rate_mbps;
  return 0.0;
}

RateTable RateTable::defaults() {
  return RateTable({{-48, 8085},
                    {-54, 6757},
                    {-58, 5775},
                    {-62, 4620},
                    {-66, 3850},
                    {-70, 2502.5},
                    {-74, 1925},
                    {-77, 962.5},
                    {-80, 385}});
}

double rssi_mean_dbm(double distance_m, const ChannelParams& p) {
  const double d = std::max(distance_m, 1.0);
  const double loss = p.pl0_db + 10.0 * p.path_loss_exp * std::log10(d) +
                      p.oxygen_db_per_m * distance_m;
  return p.eirp_dbm + p.rx_gain_dbi - loss;
}

double rssi_dbm(const AccessPoint& ap, const Vec2& pos, const ChannelParams& p, Rng& rng) {
  return rssi_mean_dbm(distance(ap.position, pos), p) + rng.normal(0.0, p.noise_sigma_db);
}

double phy_rate(double rssi_dbm, const RateTable& table) {
  if (!std::isfinite(rssi_dbm)) throw std::invalid_argument("phy_rate: non-finite rssi");
  return table.rate_for(rssi_dbm);
}

double offered_share(double rate_mbps, int n_users) {
  if (n_users < 1) throw std::logic_error("offered_share: n_users must be >= 1");
  return rate_mbps / n_users;
}

double achieved_throughput(double share_mbps, double demand_mbps, double interruption_fraction) {
  if (interruption_fraction < 0.0 || interruption_fraction > 1.0)
    throw std::invalid_argument("achieved_throughput: interruption_fraction outside [0,1]");
  return std::min(share_mbps, demand_mbps) * (1.0 - interruption_fraction);
}

}  // namespace wigig
