#include "wigig/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "wigig/csv.hpp"

namespace wigig {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::istringstream in(value);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) items.push_back(tok);
  }
  return items;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return i;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string render_conv(const std::vector<ConvLayerSpec>& conv) {
  std::string out;
  for (const auto& c : conv) {
    if (!out.empty()) out += ", ";
    out += std::to_string(c.filters) + "x" + std::to_string(c.kernel) + "s" +
           std::to_string(c.stride) + "p" + std::to_string(c.pool);
  }
  return out;
}

std::vector<ConvLayerSpec> parse_conv(const std::string& key, const std::string& v) {
  std::vector<ConvLayerSpec> conv;
  for (const auto& item : split_list(v)) {
    ConvLayerSpec c;
    // filtersxkernel[sstride][ppool], e.g. 16x5s1p2
    std::size_t pos = 0;
    auto read_int = [&](const char* what) {
      std::size_t used = 0;
      int value = 0;
      try {
        value = std::stoi(item.substr(pos), &used);
      } catch (...) {
        used = 0;
      }
      if (used == 0)
        throw std::invalid_argument("config key '" + key + "': bad conv item '" + item +
                                    "' (expected " + what + ")");
      pos += used;
      return value;
    };
    c.filters = read_int("filters");
    if (pos >= item.size() || item[pos] != 'x')
      throw std::invalid_argument("config key '" + key + "': bad conv item '" + item +
                                  "' (expected FILTERSxKERNEL[sSTRIDE][pPOOL])");
    ++pos;
    c.kernel = read_int("kernel");
    while (pos < item.size()) {
      const char tag = item[pos++];
      if (tag == 's') c.stride = read_int("stride");
      else if (tag == 'p') c.pool = read_int("pool");
      else
        throw std::invalid_argument("config key '" + key + "': bad conv item '" + item + "'");
    }
    conv.push_back(c);
  }
  return conv;
}

std::string render_tiers(const RateTable& t) {
  std::string out;
  for (const auto& tier : t.tiers()) {
    if (!out.empty()) out += ", ";
    out += format_double_exact(tier.rssi_threshold_dbm) + ":" + format_double_exact(tier.rate_mbps);
  }
  return out;
}

RateTable parse_tiers(const std::string& key, const std::string& v) {
  std::vector<RateTier> tiers;
  for (const auto& item : split_list(v)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("config key '" + key + "': tier '" + item +
                                  "' must be THRESHOLD:RATE");
    tiers.push_back({parse_double(key, trim(item.substr(0, colon))),
                     parse_double(key, trim(item.substr(colon + 1)))});
  }
  return RateTable(tiers);
}

struct Entry {
  std::string section;
  std::string key;
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> r;
    auto dbl = [&r](const char* sec, const char* key, double SimConfig::*field) {
      const std::string full = std::string(sec) + "." + key;
      r.push_back({sec, key,
                   [field, full](SimConfig& c, const std::string& v) {
                     c.*field = parse_double(full, v);
                   },
                   [field](const SimConfig& c) { return format_double_exact(c.*field); }});
    };
    auto intf = [&r](const char* sec, const char* key, int SimConfig::*field) {
      const std::string full = std::string(sec) + "." + key;
      r.push_back({sec, key,
                   [field, full](SimConfig& c, const std::string& v) {
                     c.*field = static_cast<int>(parse_int(full, v));
                   },
                   [field](const SimConfig& c) { return std::to_string(c.*field); }});
    };
    auto longf = [&r](const char* sec, const char* key, long SimConfig::*field) {
      const std::string full = std::string(sec) + "." + key;
      r.push_back({sec, key,
                   [field, full](SimConfig& c, const std::string& v) {
                     c.*field = static_cast<long>(parse_int(full, v));
                   },
                   [field](const SimConfig& c) { return std::to_string(c.*field); }});
    };
    auto chan = [&r](const char* key, double ChannelParams::*field) {
      const std::string full = std::string("channel.") + key;
      r.push_back({"channel", key,
                   [field, full](SimConfig& c, const std::string& v) {
                     c.channel.*field = parse_double(full, v);
                   },
                   [field](const SimConfig& c) { return format_double_exact(c.channel.*field); }});
    };

    dbl("sim", "room_size_m", &SimConfig::room_size_m);
    dbl("sim", "slot_s", &SimConfig::slot_s);
    intf("sim", "num_aps", &SimConfig::num_aps);
    intf("sim", "num_pois", &SimConfig::num_pois);
    intf("sim", "num_app_types", &SimConfig::num_app_types);
    dbl("sim", "interarrival_mean_s", &SimConfig::interarrival_mean_s);
    dbl("sim", "poi_stay_min_s", &SimConfig::poi_stay_min_s);
    dbl("sim", "poi_stay_max_s", &SimConfig::poi_stay_max_s);
    intf("sim", "pois_per_user_min", &SimConfig::pois_per_user_min);
    intf("sim", "pois_per_user_max", &SimConfig::pois_per_user_max);
    dbl("sim", "speed_min_mps", &SimConfig::speed_min_mps);
    dbl("sim", "speed_max_mps", &SimConfig::speed_max_mps);
    dbl("sim", "demand_min_mbps", &SimConfig::demand_min_mbps);
    dbl("sim", "demand_max_mbps", &SimConfig::demand_max_mbps);
    dbl("sim", "ul_fraction", &SimConfig::ul_fraction);
    dbl("sim", "handover_interruption_s", &SimConfig::handover_interruption_s);
    longf("sim", "total_slots", &SimConfig::total_slots);
    longf("sim", "warm_up_slots", &SimConfig::warm_up_slots);
    r.push_back({"sim", "seed",
                 [](SimConfig& c, const std::string& v) {
                   c.seed = static_cast<std::uint64_t>(parse_int("sim.seed", v));
                 },
                 [](const SimConfig& c) { return std::to_string(c.seed); }});

    r.push_back({"policy", "policy",
                 [](SimConfig& c, const std::string& v) {
                   c.policy.strategy = strategy_from_string(v);
                 },
                 [](const SimConfig& c) { return to_string(c.policy.strategy); }});
    r.push_back({"policy", "mode",
                 [](SimConfig& c, const std::string& v) { c.policy.mode = mode_from_string(v); },
                 [](const SimConfig& c) { return to_string(c.policy.mode); }});
    r.push_back({"policy", "threshold_mbps",
                 [](SimConfig& c, const std::string& v) {
                   c.policy.threshold_mbps = parse_double("policy.threshold_mbps", v);
                 },
                 [](const SimConfig& c) { return format_double_exact(c.policy.threshold_mbps); }});

    chan("eirp_dbm", &ChannelParams::eirp_dbm);
    chan("rx_gain_dbi", &ChannelParams::rx_gain_dbi);
    chan("pl0_db", &ChannelParams::pl0_db);
    chan("path_loss_exp", &ChannelParams::path_loss_exp);
    chan("oxygen_db_per_m", &ChannelParams::oxygen_db_per_m);
    chan("noise_sigma_db", &ChannelParams::noise_sigma_db);
    chan("sensitivity_dbm", &ChannelParams::sensitivity_dbm);

    r.push_back({"rate_table", "tiers",
                 [](SimConfig& c, const std::string& v) {
                   c.rate_table = parse_tiers("rate_table.tiers", v);
                 },
                 [](const SimConfig& c) { return render_tiers(c.rate_table); }});

    r.push_back({"predictor", "input_slots",
                 [](SimConfig& c, const std::string& v) {
                   c.predictor.input_slots = static_cast<int>(parse_int("predictor.input_slots", v));
                 },
                 [](const SimConfig& c) { return std::to_string(c.predictor.input_slots); }});
    r.push_back({"predictor", "output_slots",
                 [](SimConfig& c, const std::string& v) {
                   c.predictor.output_slots =
                       static_cast<int>(parse_int("predictor.output_slots", v));
                 },
                 [](const SimConfig& c) { return std::to_string(c.predictor.output_slots); }});
    r.push_back({"predictor", "conv",
                 [](SimConfig& c, const std::string& v) {
                   c.predictor.conv = parse_conv("predictor.conv", v);
                 },
                 [](const SimConfig& c) { return render_conv(c.predictor.conv); }});
    r.push_back({"predictor", "dense",
                 [](SimConfig& c, const std::string& v) {
                   c.predictor.dense.clear();
                   for (const auto& item : split_list(v))
                     c.predictor.dense.push_back(
                         static_cast<int>(parse_int("predictor.dense", item)));
                 },
                 [](const SimConfig& c) {
                   std::string out;
                   for (int w : c.predictor.dense) {
                     if (!out.empty()) out += ", ";
                     out += std::to_string(w);
                   }
                   return out;
                 }});
    r.push_back({"predictor", "learning_rate",
                 [](SimConfig& c, const std::string& v) {
                   c.predictor.learning_rate = parse_double("predictor.learning_rate", v);
                 },
                 [](const SimConfig& c) { return format_double_exact(c.predictor.learning_rate); }});
    r.push_back({"predictor", "lr_warmup_steps",
                 [](SimConfig& c, const std::string& v) {
                   c.predictor.lr_warmup_steps =
                       static_cast<long>(parse_int("predictor.lr_warmup_steps", v));
                 },
                 [](const SimConfig& c) { return std::to_string(c.predictor.lr_warmup_steps); }});
    r.push_back({"predictor", "momentum",
                 [](SimConfig& c, const std::string& v) {
                   c.predictor.momentum = parse_double("predictor.momentum", v);
                 },
                 [](const SimConfig& c) { return format_double_exact(c.predictor.momentum); }});

    r.push_back({"experiment", "emit_tuples",
                 [](SimConfig& c, const std::string& v) {
                   c.emit_tuples = parse_bool("experiment.emit_tuples", v);
                 },
                 [](const SimConfig& c) { return bool_str(c.emit_tuples); }});
    r.push_back({"experiment", "run_id",
                 [](SimConfig& c, const std::string& v) { c.run_id = v; },
                 [](const SimConfig& c) { return c.run_id; }});
    return r;
  }();
  return entries;
}

const Entry* find_entry(const std::string& section_key) {
  const auto dot = section_key.find('.');
  const std::string section = dot == std::string::npos ? "" : section_key.substr(0, dot);
  const std::string key = dot == std::string::npos ? section_key : section_key.substr(dot + 1);
  const Entry* found = nullptr;
  for (const auto& e : registry()) {
    if (e.key != key) continue;
    if (!section.empty() && e.section != section) continue;
    if (found)
      throw std::invalid_argument("config key '" + section_key +
                                  "' is ambiguous; qualify it as section.key");
    found = &e;
  }
  return found;
}

}  // namespace

void apply_config_value(SimConfig& cfg, const std::string& section_key, const std::string& value) {
  const Entry* e = find_entry(section_key);
  if (!e) throw std::invalid_argument("unknown config key '" + section_key + "'");
  e->set(cfg, value);
}

std::vector<std::string> config_key_names() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.push_back(e.section + "." + e.key);
  names.insert(names.end(), {"experiment.seeds", "experiment.out_dir", "experiment.checkpoint_in",
                             "experiment.checkpoint_out", "experiment.scenario_in",
                             "experiment.jobs"});
  return names;
}

ExperimentSpec parse_config_text(const std::string& text, const Overrides& overrides) {
  ExperimentSpec spec;
  spec.seeds.clear();  // default to the base seed unless a list is given
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> known{"sim",        "policy",    "channel",
                                                  "rate_table", "predictor", "experiment",
                                                  "sweep"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        throw std::invalid_argument("unknown config section '[" + section + "]' (line " +
                                    std::to_string(lineno) + ")");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("malformed config line " + std::to_string(lineno) + ": '" +
                                  line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::invalid_argument("config key '" + key + "' appears before any [section]");

    if (section == "sweep") {
      const Entry* e = find_entry(key);
      if (!e) throw std::invalid_argument("unknown sweep key '" + key + "'");
      if (e->section == "experiment")
        throw std::invalid_argument("sweep key '" + key + "' is not a simulation parameter");
      SweepAxis axis{e->section + "." + e->key, split_list(value)};
      if (axis.values.empty())
        throw std::invalid_argument("sweep key '" + key + "' has no values");
      spec.axes.push_back(std::move(axis));
      continue;
    }
    if (section == "experiment") {
      if (key == "seeds") {
        spec.seeds.clear();
        for (const auto& s : split_list(value))
          spec.seeds.push_back(static_cast<std::uint64_t>(parse_int("experiment.seeds", s)));
        if (spec.seeds.empty())
          throw std::invalid_argument("experiment.seeds must list at least one seed");
        continue;
      }
      if (key == "out_dir") {
        spec.out_dir = value;
        continue;
      }
      if (key == "checkpoint_in") {
        spec.checkpoint_in = value;
        continue;
      }
      if (key == "checkpoint_out") {
        spec.checkpoint_out = value;
        continue;
      }
      if (key == "scenario_in") {
        spec.scenario_in = value;
        continue;
      }
      if (key == "jobs") {
        spec.jobs = static_cast<int>(parse_int("experiment.jobs", value));
        continue;
      }
      // falls through to the registry for emit_tuples / run_id
    }

    const Entry* e = find_entry(section + "." + key);
    if (!e)
      throw std::invalid_argument("unknown config key '" + key + "' in section [" + section +
                                  "] (line " + std::to_string(lineno) + ")");
    e->set(spec.base, value);
  }

  for (const auto& [key, value] : overrides) {
    if (key == "seeds") {
      spec.seeds.clear();
      for (const auto& s : split_list(value))
        spec.seeds.push_back(static_cast<std::uint64_t>(parse_int("experiment.seeds", s)));
      continue;
    }
    if (key == "out_dir") {
      spec.out_dir = value;
      continue;
    }
    if (key == "checkpoint_in") {
      spec.checkpoint_in = value;
      continue;
    }
    if (key == "checkpoint_out") {
      spec.checkpoint_out = value;
      continue;
    }
    if (key == "scenario_in") {
      spec.scenario_in = value;
      continue;
    }
    if (key == "jobs") {
      spec.jobs = static_cast<int>(parse_int("experiment.jobs", value));
      continue;
    }
    apply_config_value(spec.base, key, value);
  }

  if (spec.seeds.empty()) spec.seeds = {spec.base.seed};
  return spec;
}

ExperimentSpec parse_config_file(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

std::string render_config(const ExperimentSpec& spec) {
  std::ostringstream o;
  std::string current;
  for (const auto& e : registry()) {
    if (e.section != current) {
      if (!current.empty()) o << "\n";
      o << "[" << e.section << "]\n";
      current = e.section;
    }
    o << e.key << " = " << e.get(spec.base) << "\n";
  }
  o << "seeds =";
  for (std::size_t i = 0; i < spec.seeds.size(); ++i)
    o << (i ? ", " : " ") << spec.seeds[i];
  o << "\n";
  if (!spec.out_dir.empty()) o << "out_dir = " << spec.out_dir << "\n";
  if (!spec.checkpoint_in.empty()) o << "checkpoint_in = " << spec.checkpoint_in << "\n";
  if (!spec.checkpoint_out.empty()) o << "checkpoint_out = " << spec.checkpoint_out << "\n";
  if (!spec.scenario_in.empty()) o << "scenario_in = " << spec.scenario_in << "\n";
  if (spec.jobs > 0) o << "jobs = " << spec.jobs << "\n";
  if (!spec.axes.empty()) {
    o << "\n[sweep]\n";
    for (const auto& axis : spec.axes) {
      o << axis.key << " =";
      for (std::size_t i = 0; i < axis.values.size(); ++i)
        o << (i ? ", " : " ") << axis.values[i];
      o << "\n";
    }
  }
  return o.str();
}

}  // namespace wigig
