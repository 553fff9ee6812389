#include "wigig/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wigig {

double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

std::string to_string(Phase p) {
  switch (p) {
    case Phase::Moving: return "Moving";
    case Phase::Dwelling: return "Dwelling";
    case Phase::Departed: return "Departed";
  }
  return "?";
}

namespace {

Vec2 uniform_in_room(double room, Rng& rng) {
  return {rng.uniform(0.0, room), rng.uniform(0.0, room)};
}

// Uniform point on the room boundary, parameterized by arc length.
Vec2 perimeter_point(double room, Rng& rng) {
  const double s = rng.uniform(0.0, 4.0 * room);
  const int side = std::min(3, static_cast<int>(s / room));
  const double t = s - side * room;
  switch (side) {
    case 0: return {t, 0.0};
    case 1: return {room, t};
    case 2: return {room - t, room};
    default: return {0.0, room - t};
  }
}

}  // namespace

Scenario generate_scenario(const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  Scenario s;
  s.room_size_m = cfg.room_size_m;
  s.speed_min_mps = cfg.speed_min_mps;
  s.speed_max_mps = cfg.speed_max_mps;
  s.pois_per_user_min = cfg.pois_per_user_min;
  s.pois_per_user_max = cfg.pois_per_user_max;

  for (int j = 0; j < cfg.num_aps; ++j)
    s.aps.push_back({j, uniform_in_room(cfg.room_size_m, rng)});

  for (int k = 0; k < cfg.num_pois; ++k) {
    PoI poi;
    poi.poi_id = k;
    poi.position = uniform_in_room(cfg.room_size_m, rng);
    const double a = rng.uniform(cfg.poi_stay_min_s, cfg.poi_stay_max_s);
    const double b = rng.uniform(cfg.poi_stay_min_s, cfg.poi_stay_max_s);
    poi.stay_min_s = std::min(a, b);
    poi.stay_max_s = std::max(a, b);
    s.pois.push_back(poi);
  }

  // Demand range split into equal contiguous subranges so types are
  // distinguishable by traffic volume.
  const double span = (cfg.demand_max_mbps - cfg.demand_min_mbps) / cfg.num_app_types;
  for (int a = 0; a < cfg.num_app_types; ++a) {
    ApplicationProfile app;
    app.app_id = a;
    app.dl_min_mbps = cfg.demand_min_mbps + a * span;
    app.dl_max_mbps = cfg.demand_min_mbps + (a + 1) * span;
    app.ul_fraction = cfg.ul_fraction;
    do {
      app.compatible_pois.clear();
      for (int k = 0; k < cfg.num_pois; ++k)
        if (rng.bernoulli(0.5)) app.compatible_pois.insert(k);
    } while (app.compatible_pois.empty());
    s.apps.push_back(app);
  }
  return s;
}

double next_arrival_gap(Rng& rng, double mean_s, double slot_s) {
  if (mean_s <= 0) throw std::invalid_argument("interarrival_mean_s must be positive");
  return std::max(slot_s, rng.normal(mean_s, mean_s / 4.0));
}

UserAgent spawn_user(const Scenario& scen, Rng& rng, int user_id) {
  UserAgent u;
  u.user_id = user_id;
  u.app_id = rng.uniform_int(0, static_cast<int>(scen.apps.size()) - 1);
  const auto& app = scen.apps[u.app_id];

  std::vector<int> compatible(app.compatible_pois.begin(), app.compatible_pois.end());
  const int want = rng.uniform_int(scen.pois_per_user_min, scen.pois_per_user_max);
  const int take = std::min<int>(want, static_cast<int>(compatible.size()));
  for (int i = 0; i < take; ++i) {
    const int j = rng.uniform_int(i, static_cast<int>(compatible.size()) - 1);
    std::swap(compatible[i], compatible[j]);
    u.itinerary.push_back(compatible[i]);
  }

  u.position = perimeter_point(scen.room_size_m, rng);
  u.exit_point = perimeter_point(scen.room_size_m, rng);
  u.speed_mps = rng.uniform(scen.speed_min_mps, scen.speed_max_mps);
  u.dl_demand_mbps = rng.uniform(app.dl_min_mbps, app.dl_max_mbps);
  u.ul_demand_mbps = app.ul_fraction * u.dl_demand_mbps;
  u.phase = Phase::Moving;
  u.leg = 0;
  return u;
}

void step_user(UserAgent& u, const Scenario& scen, double dt, Rng& rng) {
  if (u.phase == Phase::Departed) throw std::logic_error("step_user: user already departed");
  if (dt <= 0) throw std::invalid_argument("step_user: dt must be positive");

  if (u.phase == Phase::Moving) {
    const Vec2 target = scen.waypoint_of(u);
    const Vec2 d = target - u.position;
    const double dist = d.norm();
    const double step = u.speed_mps * dt;
    if (step >= dist) {
      u.position = target;
      if (u.heading_to_exit()) {
        u.phase = Phase::Departed;
      } else {
        const auto& poi = scen.pois[u.itinerary[u.leg]];
        u.dwell_remaining_s = rng.uniform(poi.stay_min_s, poi.stay_max_s);
        u.phase = Phase::Dwelling;
      }
    } else {
      u.position = u.position + Vec2{d.x / dist * step, d.y / dist * step};
    }
  } else {  // Dwelling
    u.dwell_remaining_s -= dt;
    if (u.dwell_remaining_s <= 0.0) {
      u.dwell_remaining_s = 0.0;
      u.leg += 1;
      u.phase = Phase::Moving;
    }
  }
}

// --- serialization ------------------------------------------------------

namespace {

std::string dbl(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string scenario_to_text(const Scenario& s) {
  std::ostringstream o;
  o << "[world]\n";
  o << "room_size_m = " << dbl(s.room_size_m) << "\n";
  o << "speed_min_mps = " << dbl(s.speed_min_mps) << "\n";
  o << "speed_max_mps = " << dbl(s.speed_max_mps) << "\n";
  o << "pois_per_user_min = " << s.pois_per_user_min << "\n";
  o << "pois_per_user_max = " << s.pois_per_user_max << "\n";
  for (const auto& ap : s.aps) {
    o << "[ap " << ap.ap_id << "]\n";
    o << "x = " << dbl(ap.position.x) << "\n";
    o << "y = " << dbl(ap.position.y) << "\n";
  }
  for (const auto& p : s.pois) {
    o << "[poi " << p.poi_id << "]\n";
    o << "x = " << dbl(p.position.x) << "\n";
    o << "y = " << dbl(p.position.y) << "\n";
    o << "stay_min_s = " << dbl(p.stay_min_s) << "\n";
    o << "stay_max_s = " << dbl(p.stay_max_s) << "\n";
  }
  for (const auto& a : s.apps) {
    o << "[app " << a.app_id << "]\n";
    o << "dl_min_mbps = " << dbl(a.dl_min_mbps) << "\n";
    o << "dl_max_mbps = " << dbl(a.dl_max_mbps) << "\n";
    o << "ul_fraction = " << dbl(a.ul_fraction) << "\n";
    o << "compatible_pois =";
    bool first = true;
    for (int k : a.compatible_pois) {
      o << (first ? " " : ", ") << k;
      first = false;
    }
    o << "\n";
  }
  return o.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Scenario scenario_from_text(const std::string& text) {
  Scenario s;
  s.aps.clear();
  s.pois.clear();
  s.apps.clear();
  std::istringstream in(text);
  std::string line, section;
  int index = -1;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      std::istringstream hdr(line.substr(1, line.size() - 2));
      hdr >> section;
      index = -1;
      hdr >> index;
      if (section == "ap") s.aps.push_back({index, {}});
      if (section == "poi") {
        PoI p;
        p.poi_id = index;
        s.pois.push_back(p);
      }
      if (section == "app") {
        ApplicationProfile a;
        a.app_id = index;
        a.compatible_pois.clear();
        s.apps.push_back(a);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("scenario file: malformed line '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto as_double = [&] { return std::stod(value); };
    if (section == "world") {
      if (key == "room_size_m") s.room_size_m = as_double();
      else if (key == "speed_min_mps") s.speed_min_mps = as_double();
      else if (key == "speed_max_mps") s.speed_max_mps = as_double();
      else if (key == "pois_per_user_min") s.pois_per_user_min = std::stoi(value);
      else if (key == "pois_per_user_max") s.pois_per_user_max = std::stoi(value);
      else throw std::invalid_argument("scenario file: unknown key '" + key + "'");
    } else if (section == "ap") {
      if (key == "x") s.aps.back().position.x = as_double();
      else if (key == "y") s.aps.back().position.y = as_double();
      else throw std::invalid_argument("scenario file: unknown key '" + key + "'");
    } else if (section == "poi") {
      if (key == "x") s.pois.back().position.x = as_double();
      else if (key == "y") s.pois.back().position.y = as_double();
      else if (key == "stay_min_s") s.pois.back().stay_min_s = as_double();
      else if (key == "stay_max_s") s.pois.back().stay_max_s = as_double();
      else throw std::invalid_argument("scenario file: unknown key '" + key + "'");
    } else if (section == "app") {
      auto& app = s.apps.back();
      if (key == "dl_min_mbps") app.dl_min_mbps = as_double();
      else if (key == "dl_max_mbps") app.dl_max_mbps = as_double();
      else if (key == "ul_fraction") app.ul_fraction = as_double();
      else if (key == "compatible_pois") {
        std::istringstream vs(value);
        std::string tok;
        while (std::getline(vs, tok, ',')) app.compatible_pois.insert(std::stoi(trim(tok)));
      } else {
        throw std::invalid_argument("scenario file: unknown key '" + key + "'");
      }
    } else {
      throw std::invalid_argument("scenario file: unknown section '" + section + "'");
    }
  }
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << scenario_to_text(s);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_text(buf.str());
}

}  // namespace wigig
