#ifndef WIGIG_SCENARIO_HPP
#define WIGIG_SCENARIO_HPP

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wigig/rng.hpp"
#include "wigig/sim_config.hpp"

namespace wigig {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  double norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

struct AccessPoint {
  int ap_id = 0;
  Vec2 position;
};

/// A place users walk to and dwell at. Each PoI has its own dwell-time
/// subrange, so some are quick stops and some are long stays.
struct PoI {
  int poi_id = 0;
  Vec2 position;
  double stay_min_s = 1.0;
  double stay_max_s = 100.0;
};

/// An application type: a contiguous demand subrange plus the set of PoIs
/// users of this type may visit.
struct ApplicationProfile {
  int app_id = 0;
  double dl_min_mbps = 10.0;
  double dl_max_mbps = 1000.0;
  double ul_fraction = 0.1;
  std::set<int> compatible_pois;
};

enum class Phase { Moving, Dwelling, Departed };
std::string to_string(Phase p);

/// Dynamic per-user state. Users walk entry -> PoIs in itinerary order ->
/// exit in straight constant-speed segments, dwelling at each PoI.
struct UserAgent {
  int user_id = 0;
  int app_id = 0;
  std::vector<int> itinerary;
  int leg = 0;  // index into itinerary; == itinerary.size() means heading to the exit
  Vec2 position;
  Vec2 exit_point;
  double speed_mps = 1.0;
  Phase phase = Phase::Moving;
  double dwell_remaining_s = 0.0;
  double dl_demand_mbps = 0.0;
  double ul_demand_mbps = 0.0;
  std::optional<int> current_ap;

  bool heading_to_exit() const { return leg >= static_cast<int>(itinerary.size()); }
};

/// The static world: room bounds, AP and PoI placements, application
/// profiles, and the behavioral ranges users are drawn from.
struct Scenario {
  double room_size_m = 300.0;
  std::vector<AccessPoint> aps;
  std::vector<PoI> pois;
  std::vector<ApplicationProfile> apps;
  double speed_min_mps = 0.1;
  double speed_max_mps = 2.0;
  int pois_per_user_min = 1;
  int pois_per_user_max = 3;

  const Vec2& waypoint_of(const UserAgent& u) const {
    return u.heading_to_exit() ? u.exit_point : pois[u.itinerary[u.leg]].position;
  }
};

/// Random world: APs and PoIs uniform in the room, demand range split into
/// equal contiguous subranges per application type, each type getting a
/// uniformly drawn non-empty compatible-PoI subset. Per-PoI dwell subranges
/// are order statistics of two uniform draws over the configured range.
Scenario generate_scenario(const SimConfig& cfg, Rng& rng);

/// Gap to the next user arrival: Normal(mean, (mean/4)^2) clamped below at
/// one slot length.
double next_arrival_gap(Rng& rng, double mean_s, double slot_s);

/// New user entering at a uniform perimeter point with a random application,
/// itinerary, speed and demand.
UserAgent spawn_user(const Scenario& scen, Rng& rng, int user_id);

/// Advance one slot of mobility. Throws std::logic_error on a Departed user.
void step_user(UserAgent& u, const Scenario& scen, double dt, Rng& rng);

/// Human-readable key=value serialization; round-trips doubles exactly.
std::string scenario_to_text(const Scenario& s);
Scenario scenario_from_text(const std::string& text);
void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace wigig

#endif  // WIGIG_SCENARIO_HPP
