#include "wigig/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace wigig {

namespace {

// Separate RNG streams so the world's evolution (arrivals, mobility, RSSI
// noise) never depends on the policy or the model.
constexpr std::uint64_t kWorldStream = 0x57;
constexpr std::uint64_t kModelStream = 0x4d;

}  // namespace

std::string SimConfig::effective_run_id() const {
  return run_id.empty() ? "run-" + std::to_string(seed) : run_id;
}

Architecture PredictorConfig::architecture(int features) const {
  Architecture a;
  a.input_slots = input_slots;
  a.output_slots = output_slots;
  a.features = features;
  a.conv = conv;
  a.dense = dense;
  return a;
}

void SimConfig::validate() const {
  if (!(room_size_m > 0)) throw std::invalid_argument("sim.room_size_m must be positive");
  if (!(slot_s > 0)) throw std::invalid_argument("sim.slot_s must be positive");
  if (num_aps < 1) throw std::invalid_argument("sim.num_aps must be >= 1");
  if (num_pois < 1) throw std::invalid_argument("sim.num_pois must be >= 1");
  if (num_app_types < 1) throw std::invalid_argument("sim.num_app_types must be >= 1");
  if (!(interarrival_mean_s > 0))
    throw std::invalid_argument("sim.interarrival_mean_s must be positive");
  if (!(poi_stay_min_s > 0) || poi_stay_min_s > poi_stay_max_s)
    throw std::invalid_argument("sim.poi_stay_min_s/poi_stay_max_s must satisfy 0 < min <= max");
  if (pois_per_user_min < 1 || pois_per_user_min > pois_per_user_max)
    throw std::invalid_argument("sim.pois_per_user_min/max must satisfy 1 <= min <= max");
  if (!(speed_min_mps > 0) || speed_min_mps > speed_max_mps)
    throw std::invalid_argument("sim.speed_min_mps/speed_max_mps must satisfy 0 < min <= max");
  if (!(demand_min_mbps > 0) || demand_min_mbps > demand_max_mbps)
    throw std::invalid_argument("sim.demand_min_mbps/demand_max_mbps must satisfy 0 < min <= max");
  if (!(ul_fraction > 0) || ul_fraction > 1)
    throw std::invalid_argument("sim.ul_fraction must be in (0,1]");
  if (handover_interruption_s < 0 || handover_interruption_s > slot_s)
    throw std::invalid_argument("sim.handover_interruption_s must be in [0, slot_s]");
  if (total_slots < 0) throw std::invalid_argument("sim.total_slots must be >= 0");
  if (warm_up_slots < 0) throw std::invalid_argument("sim.warm_up_slots must be >= 0");
  if (policy.strategy == Strategy::Predictive && total_slots > 0 &&
      total_slots <= warm_up_slots)
    throw std::invalid_argument(
        "sim.total_slots must exceed sim.warm_up_slots for predictive policies");
  if (policy.threshold_mbps < 0)
    throw std::invalid_argument("policy.threshold_mbps must be >= 0");
  channel.validate();
  if (rate_table.tiers().empty()) throw std::invalid_argument("rate_table.tiers must not be empty");
  if (predictor.input_slots < 1 || predictor.output_slots < 1)
    throw std::invalid_argument("predictor.input_slots/output_slots must be >= 1");
  if (!(predictor.learning_rate > 0))
    throw std::invalid_argument("predictor.learning_rate must be positive");
  if (predictor.lr_warmup_steps < 0)
    throw std::invalid_argument("predictor.lr_warmup_steps must be >= 0");
  if (predictor.momentum < 0 || predictor.momentum >= 1)
    throw std::invalid_argument("predictor.momentum must be in [0,1)");
  predictor.architecture(features()).validate();
}

Engine::Engine(const SimConfig& cfg, std::optional<Scenario> world, const ModelState* carry_in)
    : cfg_(cfg),
      world_rng_(Rng::stream(cfg.seed, kWorldStream)),
      stats_(cfg.features()) {
  cfg_.validate();
  if (world) {
    scen_ = std::move(*world);
    if (static_cast<int>(scen_.aps.size()) != cfg_.num_aps)
      throw std::invalid_argument("provided scenario AP count does not match sim.num_aps");
  } else {
    scen_ = generate_scenario(cfg_, world_rng_);
  }

  if (cfg_.policy.strategy == Strategy::Predictive) {
    if (carry_in) {
      if (carry_in->net.arch().features != cfg_.features())
        throw std::invalid_argument("carried-in model feature count does not match sim.num_aps");
      net_ = carry_in->net;
      stats_ = carry_in->stats;
    } else {
      Rng model_rng = Rng::stream(cfg_.seed, kModelStream);
      net_ = ConvNet::init(cfg_.predictor.architecture(cfg_.features()), model_rng);
    }
  }

  next_arrival_time_ = next_arrival_gap(world_rng_, cfg_.interarrival_mean_s, cfg_.slot_s);
}

ModelState Engine::model_state() const {
  if (!net_) throw std::logic_error("Engine::model_state: reactive policy carries no model");
  return ModelState{*net_, stats_};
}

MetricsRecord Engine::run_slot() {
  const long t = slot_;
  const int x_slots = cfg_.predictor.input_slots;
  const int y_slots = cfg_.predictor.output_slots;
  const int num_aps = cfg_.num_aps;

  // (1) arrivals
  const int first_new_id = next_user_id_;
  while (next_arrival_time_ <= static_cast<double>(t) * cfg_.slot_s) {
    UserRuntime rt{spawn_user(scen_, world_rng_, next_user_id_),
                   History(next_user_id_, x_slots + y_slots),
                   {}};
    users_.push_back(std::move(rt));
    ++next_user_id_;
    next_arrival_time_ += next_arrival_gap(world_rng_, cfg_.interarrival_mean_s, cfg_.slot_s);
  }

  // (2) mobility; users spawned this slot hold their entry point until the
  // next slot, so every trajectory starts with an observable Moving sample
  for (auto& rt : users_) {
    if (rt.agent.phase == Phase::Departed || rt.agent.user_id >= first_new_id) continue;
    step_user(rt.agent, scen_, cfg_.slot_s, world_rng_);
  }

  std::vector<UserRuntime*> active;
  active.reserve(users_.size());
  int n_active = 0;
  for (auto& rt : users_) {
    if (rt.agent.phase != Phase::Departed) {
      active.push_back(&rt);
      ++n_active;
    }
  }

  // (3) RSSI sampling for every active user-AP pair
  std::vector<std::vector<double>> rssi(active.size(), std::vector<double>(num_aps));
  for (std::size_t i = 0; i < active.size(); ++i)
    for (int j = 0; j < num_aps; ++j)
      rssi[i][j] = rssi_dbm(scen_.aps[j], active[i]->agent.position, cfg_.channel, world_rng_);

  // (4) predictions, once past warm-up under a predictive policy
  std::vector<std::optional<std::size_t>> fresh_pred(active.size());
  if (net_ && t >= cfg_.warm_up_slots) {
    for (std::size_t i = 0; i < active.size(); ++i) {
      auto p = predict_user(*net_, stats_, active[i]->history, t, scratch_);
      if (p) {
        active[i]->pending.push_back(std::move(*p));
        fresh_pred[i] = active[i]->pending.size() - 1;
      }
    }
  }

  // (5) association
  std::vector<UserForecast> forecasts(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    forecasts[i].user_id = active[i]->agent.user_id;
    if (fresh_pred[i]) {
      const Prediction& p = active[i]->pending[*fresh_pred[i]];
      auto& rates = forecasts[i].ap_rates;
      rates.assign(num_aps, std::vector<double>(y_slots));
      for (int j = 0; j < num_aps; ++j)
        for (int y = 0; y < y_slots; ++y)
          rates[j][y] = phy_rate(p.values(y, 2 + j), cfg_.rate_table);
    } else {
      forecasts[i].ap_rates = reactive_forecast(rssi[i], cfg_.rate_table);
    }
  }
  std::map<int, int> current;
  for (const auto* rt : active)
    if (rt->agent.current_ap) current[rt->agent.user_id] = *rt->agent.current_ap;
  AssociationPlan plan = associate(forecasts, current, cfg_.policy, num_aps);

  // (6) throughput realization
  const double interruption = std::min(1.0, cfg_.handover_interruption_s / cfg_.slot_s);
  double tput_sum = 0.0;
  int connected = 0;
  SlotAudit audit;
  const bool auditing = static_cast<bool>(observer_);
  if (auditing) {
    audit.slot = t;
    audit.users.resize(active.size());
    audit.ap_load = plan.ap_load;
  }

  for (std::size_t i = 0; i < active.size(); ++i) {
    UserAgent& agent = active[i]->agent;
    const int uid = agent.user_id;
    const auto it = plan.assignment.find(uid);
    double dl_ach = 0.0, ul_ach = 0.0, rate = 0.0, share = 0.0;
    std::optional<int> ap;
    const bool handed_over = plan.handovers.count(uid) > 0;
    if (it != plan.assignment.end()) {
      ap = it->second;
      rate = phy_rate(rssi[i][*ap], cfg_.rate_table);
      share = rate > 0.0 ? offered_share(rate, plan.ap_load[*ap]) : 0.0;
      const double demand = agent.dl_demand_mbps + agent.ul_demand_mbps;
      const double total = achieved_throughput(share, demand, handed_over ? interruption : 0.0);
      dl_ach = total * agent.dl_demand_mbps / demand;
      ul_ach = total * agent.ul_demand_mbps / demand;
      tput_sum += total;
      ++connected;
    }
    agent.current_ap = ap;

    // (7) telemetry
    UserTuple tuple{t, dl_ach, ul_ach, rssi[i]};
    stats_.observe(tuple);
    active[i]->history.record(std::move(tuple));

    if (auditing) {
      UserSlotAudit& ua = audit.users[i];
      ua.user_id = uid;
      ua.app_id = agent.app_id;
      ua.phase = agent.phase;
      ua.position = agent.position;
      if (agent.phase == Phase::Dwelling) ua.dwelling_poi = agent.itinerary[agent.leg];
      ua.itinerary = agent.itinerary;
      ua.ap = ap;
      ua.handover = handed_over;
      ua.phy_rate_mbps = rate;
      ua.share_mbps = share;
      ua.achieved_dl_mbps = dl_ach;
      ua.achieved_ul_mbps = ul_ach;
      ua.dl_demand_mbps = agent.dl_demand_mbps;
      ua.ul_demand_mbps = agent.ul_demand_mbps;
      ua.rssi_dbm = rssi[i];
      if (fresh_pred[i]) ua.prediction = active[i]->pending[*fresh_pred[i]].values;
    }
  }

  // (8) one online training pass per user with a full window
  std::optional<double> training_loss;
  if (net_) {
    std::vector<const History*> hists;
    hists.reserve(active.size());
    for (const auto* rt : active) hists.push_back(&rt->history);
    const double lr = cfg_.predictor.effective_lr(net_->steps());
    const TrainOutcome out =
        online_train_step(*net_, stats_, hists, lr, cfg_.predictor.momentum, scratch_);
    training_loss = out.mean_loss;
  }

  // (9) grade predictions whose horizon completed this slot
  std::optional<double> mae;
  {
    double mae_sum = 0.0;
    int graded = 0;
    for (auto* rt : active) {
      while (!rt->pending.empty() &&
             rt->pending.front().made_at_slot + y_slots - 1 <= t) {
        const Prediction& p = rt->pending.front();
        if (p.made_at_slot + y_slots - 1 == t &&
            rt->history.size() >= static_cast<std::size_t>(y_slots)) {
          double err = 0.0;
          for (int y = 0; y < y_slots; ++y) {
            const UserTuple& actual = rt->history.from_back(y_slots - 1 - y);
            for (int j = 0; j < num_aps; ++j)
              err += std::abs(p.values(y, 2 + j) - actual.rssi_dbm[j]);
          }
          mae_sum += err / (static_cast<double>(y_slots) * num_aps);
          ++graded;
        }
        rt->pending.pop_front();
      }
    }
    if (graded > 0) mae = mae_sum / graded;
  }

  // (10) retire departed users
  if (auditing) {
    for (const auto& rt : users_)
      if (rt.agent.phase == Phase::Departed) audit.departed_user_ids.push_back(rt.agent.user_id);
  }
  std::erase_if(users_, [](const UserRuntime& rt) { return rt.agent.phase == Phase::Departed; });

  cumulative_handovers_ += static_cast<long>(plan.handovers.size());

  MetricsRecord rec;
  rec.slot = t;
  rec.active_users = n_active;
  rec.connected_users = connected;
  rec.mean_tput_all_mbps = n_active > 0 ? tput_sum / n_active : 0.0;
  rec.mean_tput_connected_mbps = connected > 0 ? tput_sum / connected : 0.0;
  rec.handovers = static_cast<int>(plan.handovers.size());
  rec.cumulative_handovers = cumulative_handovers_;
  rec.prediction_mae_db = mae;
  rec.training_loss = training_loss;

  if (auditing) observer_(audit);

  ++slot_;
  return rec;
}

RunSummary summarize(const std::vector<MetricsRecord>& series, long warm_up_slots) {
  RunSummary s;
  s.slots = static_cast<long>(series.size());
  double tput_user_slots = 0.0, users = 0.0, connected = 0.0, tput_conn = 0.0;
  for (const auto& r : series) {
    s.total_handovers += r.handovers;
    s.peak_active_users = std::max(s.peak_active_users, static_cast<double>(r.active_users));
    if (r.slot < warm_up_slots) continue;
    s.post_warmup_handovers += r.handovers;
    tput_user_slots += r.mean_tput_all_mbps * r.active_users;
    users += r.active_users;
    tput_conn += r.mean_tput_connected_mbps * r.connected_users;
    connected += r.connected_users;
  }
  if (users > 0) s.mean_tput_all_mbps = tput_user_slots / users;
  if (connected > 0) s.mean_tput_connected_mbps = tput_conn / connected;

  const long tail_start = s.slots - std::max<long>(1, s.slots / 10);
  double mae_sum = 0.0, loss_sum = 0.0;
  long mae_n = 0, loss_n = 0;
  for (const auto& r : series) {
    if (r.slot < tail_start) continue;
    if (r.prediction_mae_db) {
      mae_sum += *r.prediction_mae_db;
      ++mae_n;
    }
    if (r.training_loss) {
      loss_sum += *r.training_loss;
      ++loss_n;
    }
  }
  if (mae_n) s.final_window_mae_db = mae_sum / mae_n;
  if (loss_n) s.final_window_loss = loss_sum / loss_n;
  return s;
}

RunResult run_simulation(const SimConfig& cfg, std::optional<Scenario> world,
                         const ModelState* carry_in, SlotObserver observer) {
  Engine engine(cfg, std::move(world), carry_in);
  if (observer) engine.set_observer(std::move(observer));
  RunResult result;
  result.series.reserve(cfg.total_slots);
  for (long t = 0; t < cfg.total_slots; ++t) result.series.push_back(engine.run_slot());
  result.summary = summarize(result.series, cfg.warm_up_slots);
  result.scenario = engine.scenario();
  if (engine.has_model()) result.model = engine.model_state();
  return result;
}

// --- experiment runner ----------------------------------------------------

namespace {

std::vector<std::vector<std::pair<std::string, std::string>>> cell_grid(
    const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<std::pair<std::string, std::string>>> cells{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& cell : cells)
      for (const auto& v : axis.values) {
        auto c = cell;
        c.emplace_back(axis.key, v);
        next.push_back(std::move(c));
      }
    cells = std::move(next);
  }
  return cells;
}

std::string cell_key_of(const std::vector<std::pair<std::string, std::string>>& cell) {
  if (cell.empty()) return "-";
  std::string key;
  for (const auto& [k, v] : cell) {
    if (!key.empty()) key += ";";
    key += k + "=" + v;
  }
  return key;
}

}  // namespace

// Defined in config.cpp; used here to apply sweep values by key name.
void apply_config_value(SimConfig& cfg, const std::string& section_key, const std::string& value);

std::vector<CellResult> run_experiment(const ExperimentSpec& spec,
                                       const std::function<void(const CellResult&)>& on_cell) {
  if (spec.seeds.empty()) throw std::invalid_argument("experiment.seeds must not be empty");
  const auto cells = cell_grid(spec.axes);

  std::optional<ModelState> checkpoint_in;
  std::vector<CellResult> rows(cells.size() * spec.seeds.size());
  std::mutex mu;
  std::atomic<std::size_t> next_seed{0};
  const int jobs = spec.jobs > 0
                       ? spec.jobs
                       : std::max(1u, std::thread::hardware_concurrency());

  auto seed_chain = [&](std::size_t seed_idx) {
    const std::uint64_t seed = spec.seeds[seed_idx];
    std::optional<ModelState> carry;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      CellResult row;
      row.cell_key = cell_key_of(cells[ci]);
      row.seed = seed;
      try {
        SimConfig cfg = spec.base;
        for (const auto& [k, v] : cells[ci]) apply_config_value(cfg, k, v);
        cfg.seed = seed;
        cfg.validate();
        row.cfg = cfg;
        std::optional<Scenario> world;
        if (!spec.scenario_in.empty()) world = load_scenario(spec.scenario_in);
        const ModelState* carry_ptr = nullptr;
        if (cfg.policy.strategy == Strategy::Predictive) {
          if (carry)
            carry_ptr = &*carry;
          else if (checkpoint_in)
            carry_ptr = &*checkpoint_in;
        }
        RunResult res = run_simulation(cfg, std::move(world), carry_ptr);
        row.summary = res.summary;
        row.ok = true;
        if (res.model) carry = std::move(res.model);
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      {
        std::lock_guard<std::mutex> lk(mu);
        rows[seed_idx * cells.size() + ci] = row;
        if (on_cell) on_cell(rows[seed_idx * cells.size() + ci]);
      }
    }
  };

  if (!spec.checkpoint_in.empty()) checkpoint_in = load_checkpoint(spec.checkpoint_in);

  std::vector<std::thread> pool;
  const int workers = std::min<std::size_t>(jobs, spec.seeds.size());
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next_seed.fetch_add(1);
        if (i >= spec.seeds.size()) return;
        seed_chain(i);
      }
    });
  for (auto& th : pool) th.join();

  std::sort(rows.begin(), rows.end(), [](const CellResult& a, const CellResult& b) {
    return std::tie(a.cell_key, a.seed) < std::tie(b.cell_key, b.seed);
  });
  return rows;
}

std::vector<CellAggregate> aggregate_cells(const std::vector<CellResult>& rows) {
  std::map<std::string, std::vector<const CellResult*>> groups;
  for (const auto& r : rows)
    if (r.ok) groups[r.cell_key].push_back(&r);

  std::vector<CellAggregate> out;
  for (const auto& [key, members] : groups) {
    CellAggregate a;
    a.cell_key = key;
    a.n_seeds = static_cast<int>(members.size());
    auto mean_std = [&](auto getter) -> std::pair<double, double> {
      double m = 0.0;
      for (const auto* r : members) m += getter(*r);
      m /= members.size();
      double v = 0.0;
      for (const auto* r : members) {
        const double d = getter(*r) - m;
        v += d * d;
      }
      return {m, std::sqrt(v / members.size())};
    };
    std::tie(a.tput_all_mean, a.tput_all_std) =
        mean_std([](const CellResult& r) { return r.summary.mean_tput_all_mbps; });
    std::tie(a.tput_connected_mean, a.tput_connected_std) =
        mean_std([](const CellResult& r) { return r.summary.mean_tput_connected_mbps; });
    std::tie(a.handovers_mean, a.handovers_std) = mean_std(
        [](const CellResult& r) { return static_cast<double>(r.summary.total_handovers); });
    int mae_n = 0;
    for (const auto* r : members)
      if (r->summary.final_window_mae_db) ++mae_n;
    if (mae_n == static_cast<int>(members.size())) {
      auto [m, sd] =
          mean_std([](const CellResult& r) { return *r.summary.final_window_mae_db; });
      a.mae_mean = m;
      a.mae_std = sd;
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace wigig
