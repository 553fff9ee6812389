#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wigig/channel.hpp"
#include "wigig/rng.hpp"
#include "wigig/scenario.hpp"

using namespace wigig;

namespace {

ChannelParams quiet_defaults() {
  ChannelParams p;
  p.noise_sigma_db = 0.0;
  return p;
}

// Independent tier lookup: scan the raw list top-down.
double scan_rate(const RateTable& t, double rssi) {
  for (const auto& tier : t.tiers())
    if (rssi >= tier.rssi_threshold_dbm) return tier.rate_mbps;
  return 0.0;
}

}  // namespace

TEST_CASE("rssi closed-form values at canonical distances") {
  const ChannelParams p = quiet_defaults();
  // 50 - 68 - 0 - 0.015: the 1 m oxygen term keeps it a hair under -18
  CHECK(rssi_mean_dbm(1.0, p) == doctest::Approx(-18.015).epsilon(1e-12));
  CHECK(rssi_mean_dbm(1.0, p) == doctest::Approx(-18.0).epsilon(2e-3));
  CHECK(rssi_mean_dbm(100.0, p) == doctest::Approx(-59.5).epsilon(1e-12));
  // 50 - (68 + 20*log10(500) + 0.015*500)
  CHECK(rssi_mean_dbm(500.0, p) == doctest::Approx(-79.4794000867).epsilon(1e-9));
  CHECK(rssi_mean_dbm(500.0, p) > p.sensitivity_dbm);  // still reachable at 500 m
}

TEST_CASE("rssi is flat inside one meter and strictly decreasing beyond") {
  const ChannelParams p = quiet_defaults();
  CHECK(rssi_mean_dbm(0.2, p) == doctest::Approx(rssi_mean_dbm(1.0, p) + 0.012).epsilon(1e-9));
  double prev = rssi_mean_dbm(1.0, p);
  for (double d = 2.0; d <= 600.0; d += 1.0) {
    const double v = rssi_mean_dbm(d, p);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("noisy rssi uses the noise stream, zero sigma is deterministic") {
  ChannelParams p;
  p.noise_sigma_db = 0.0;
  Rng rng(1);
  const AccessPoint ap{0, {0.0, 0.0}};
  const Vec2 pos{30.0, 40.0};  // d = 50
  const double base = rssi_mean_dbm(50.0, p);
  for (int i = 0; i < 5; ++i) CHECK(rssi_dbm(ap, pos, p, rng) == base);

  p.noise_sigma_db = 0.5;
  double acc = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) acc += rssi_dbm(ap, pos, p, rng) - base;
  CHECK(std::abs(acc / n) < 0.02);  // zero-mean noise
}

TEST_CASE("phy_rate lookup matches a brute-force scan of the table") {
  const RateTable table = RateTable::defaults();
  CHECK(phy_rate(-47.0, table) == 8085.0);
  CHECK(phy_rate(-100.0, table) == 0.0);
  // -59.5 sits between the -62 and -58 thresholds, so the -62 tier applies.
  CHECK(scan_rate(table, -59.5) == 4620.0);
  CHECK(phy_rate(-59.5, table) == 4620.0);
  for (double rssi = -95.0; rssi <= -40.0; rssi += 0.25)
    CHECK(phy_rate(rssi, table) == scan_rate(table, rssi));
}

TEST_CASE("phy_rate is non-increasing as rssi decreases") {
  const RateTable table = RateTable::defaults();
  double prev = phy_rate(-40.0, table);
  for (double rssi = -40.0; rssi >= -100.0; rssi -= 0.1) {
    const double r = phy_rate(rssi, table);
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("rate table validation") {
  CHECK_THROWS(RateTable(std::vector<RateTier>{}));
  CHECK_THROWS(RateTable(std::vector<RateTier>{{-48, 8085}, {-48, 6757}}));  // thresholds equal
  CHECK_THROWS(RateTable(std::vector<RateTier>{{-48, 6757}, {-54, 8085}}));  // rates increase
  CHECK_NOTHROW(RateTable(std::vector<RateTier>{{-48, 8085}, {-54, 6757}}));
}

TEST_CASE("offered_share splits airtime equally") {
  CHECK(offered_share(3850.0, 2) == 1925.0);
  CHECK(offered_share(1234.5, 1) == 1234.5);
  CHECK_THROWS_AS(offered_share(1000.0, 0), std::logic_error);

  // conservation: shares of n users at one tier sum to the tier rate
  const int n = 7;
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += offered_share(5775.0, n);
  CHECK(total == doctest::Approx(5775.0).epsilon(1e-12));
}

TEST_CASE("achieved_throughput caps at demand and pays the interruption") {
  CHECK(achieved_throughput(2000.0, 500.0, 0.0) == 500.0);
  CHECK(achieved_throughput(2000.0, 500.0, 0.1) == doctest::Approx(450.0).epsilon(1e-12));
  CHECK(achieved_throughput(0.0, 500.0, 0.0) == 0.0);
  CHECK(achieved_throughput(0.0, 500.0, 0.5) == 0.0);
  CHECK(achieved_throughput(300.0, 500.0, 0.0) == 300.0);  // share-limited
  CHECK_THROWS(achieved_throughput(100.0, 100.0, 1.5));
  CHECK_THROWS(achieved_throughput(100.0, 100.0, -0.1));
}

TEST_CASE("airtime budget holds for mixed tiers") {
  // users at different tiers sharing one AP: each gets 1/n of airtime
  const RateTable table = RateTable::defaults();
  const std::vector<double> rssi{-45.0, -57.0, -63.0, -71.0};
  const int n = static_cast<int>(rssi.size());
  double airtime = 0.0;
  for (double r : rssi) {
    const double rate = phy_rate(r, table);
    const double share = offered_share(rate, n);
    airtime += share / rate;
  }
  CHECK(airtime <= 1.0 + 1e-9);
  CHECK(airtime == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("channel params validation names the field") {
  ChannelParams p;
  p.noise_sigma_db = -1.0;
  try {
    p.validate();
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("noise_sigma_db") != std::string::npos);
  }
}
