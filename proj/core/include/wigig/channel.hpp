#ifndef WIGIG_CHANNEL_HPP
#define WIGIG_CHANNEL_HPP

#include <vector>

#include "wigig/rng.hpp"

namespace wigig {

struct Vec2;
struct AccessPoint;

/// Line-of-sight 60 GHz link model: log-distance path loss plus oxygen
/// absorption, with Gaussian measurement noise on each RSSI sample.
struct ChannelParams {
  double eirp_dbm = 40.0;
  double rx_gain_dbi = 10.0;
  double pl0_db = 68.0;           // loss at 1 m
  double path_loss_exp = 2.0;
  double oxygen_db_per_m = 0.015;
  double noise_sigma_db = 0.5;
  double sensitivity_dbm = -80.0;

  void validate() const;  // throws std::invalid_argument naming the field
};

struct RateTier {
  double rssi_threshold_dbm;
  double rate_mbps;
};

/// Ordered RSSI->PHY-rate steps, descending thresholds. Lookup below the last
/// threshold yields 0 (disconnected).
class RateTable {
 public:
  RateTable() = default;
  explicit RateTable(std::vector<RateTier> tiers);

  /// Rate of the first threshold <= rssi; 0 below the last threshold.
  double rate_for(double rssi_dbm) const;

  double max_rate() const { return tiers_.empty() ? 0.0 : tiers_.front().rate_mbps; }
  double min_threshold() const { return tiers_.empty() ? 0.0 : tiers_.back().rssi_threshold_dbm; }
  const std::vector<RateTier>& tiers() const { return tiers_; }

  /// 802.11ad/ay-style single-carrier steps used when no table is configured.
  static RateTable defaults();

 private:
  std::vector<RateTier> tiers_;
};

/// Deterministic part of the received signal strength at distance d meters.
double rssi_mean_dbm(double distance_m, const ChannelParams& p);

/// One noisy RSSI sample for a user at `pos` from `ap`.
double rssi_dbm(const AccessPoint& ap, const Vec2& pos, const ChannelParams& p, Rng& rng);

double phy_rate(double rssi_dbm, const RateTable& table);

/// Equal airtime split of an AP's PHY rate among its users.
double offered_share(double rate_mbps, int n_users);

/// Demand-capped share, scaled down by the handover interruption fraction.
double achieved_throughput(double share_mbps, double demand_mbps, double interruption_fraction);

}  // namespace wigig

#endif  // WIGIG_CHANNEL_HPP
