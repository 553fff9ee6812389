#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "support/checkers.hpp"
#include "wigig/csv.hpp"
#include "wigig/engine.hpp"

using namespace wigig;

namespace {

SimConfig small_config(std::uint64_t seed, Strategy strategy, Mode mode = Mode::Greedy) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.total_slots = 400;
  cfg.warm_up_slots = 100;
  cfg.policy = {strategy, mode, 200.0};
  return cfg;
}

std::string series_text(const std::vector<MetricsRecord>& series) {
  std::string out = metrics_csv_header();
  for (const auto& r : series) out += "\n" + metrics_csv_row(r);
  return out;
}

}  // namespace

TEST_CASE("slot zero of an empty room reports zeros") {
  SimConfig cfg = small_config(3, Strategy::Reactive);
  Engine engine(cfg);
  const MetricsRecord r = engine.run_slot();
  CHECK(r.slot == 0);
  CHECK(r.active_users == 0);
  CHECK(r.connected_users == 0);
  CHECK(r.mean_tput_all_mbps == 0.0);
  CHECK(r.handovers == 0);
  CHECK(!r.prediction_mae_db.has_value());
}

TEST_CASE("zero total slots yields an empty series") {
  SimConfig cfg = small_config(3, Strategy::Reactive);
  cfg.total_slots = 0;
  const RunResult res = run_simulation(cfg);
  CHECK(res.series.empty());
  CHECK(res.summary.total_handovers == 0);
}

TEST_CASE("identical seeds reproduce byte-identical metrics and checkpoints") {
  SimConfig cfg = small_config(7, Strategy::Predictive);
  const RunResult a = run_simulation(cfg);
  const RunResult b = run_simulation(cfg);
  CHECK(series_text(a.series) == series_text(b.series));
  REQUIRE(a.model.has_value());
  REQUIRE(b.model.has_value());
  CHECK(std::equal(a.model->net.params().begin(), a.model->net.params().end(),
                   b.model->net.params().begin()));
  CHECK(a.model->stats.count() == b.model->stats.count());

  SimConfig other = cfg;
  other.seed = 8;
  const RunResult c = run_simulation(other);
  CHECK(series_text(a.series) != series_text(c.series));
}

TEST_CASE("matched seeds share the same world across policies") {
  // The user arrival/mobility/RSSI stream must not depend on the policy.
  SimConfig rg = small_config(11, Strategy::Reactive, Mode::Greedy);
  SimConfig rc = small_config(11, Strategy::Reactive, Mode::Conservative);
  std::vector<std::pair<long, Vec2>> pos_g, pos_c;
  auto grab = [](std::vector<std::pair<long, Vec2>>& sink) {
    return [&sink](const SlotAudit& a) {
      for (const auto& u : a.users) sink.push_back({a.slot * 10000 + u.user_id, u.position});
    };
  };
  run_simulation(rg, std::nullopt, nullptr, grab(pos_g));
  run_simulation(rc, std::nullopt, nullptr, grab(pos_c));
  REQUIRE(pos_g.size() == pos_c.size());
  for (std::size_t i = 0; i < pos_g.size(); ++i) {
    CHECK(pos_g[i].first == pos_c[i].first);
    CHECK(pos_g[i].second.x == pos_c[i].second.x);
    CHECK(pos_g[i].second.y == pos_c[i].second.y);
  }
}

TEST_CASE("invariants hold over an audited run") {
  SimConfig cfg = small_config(13, Strategy::Predictive);
  cfg.total_slots = 600;
  cfg.warm_up_slots = 150;
  Engine probe(cfg);  // regenerates the same scenario for the checker
  test::InvariantChecker checker(probe.scenario(), cfg);
  run_simulation(cfg, std::nullopt, nullptr,
                 [&checker](const SlotAudit& a) { checker.on_slot(a); });
  checker.finalize();
  for (const auto& v : checker.violations()) MESSAGE(v);
  CHECK(checker.violations().empty());
  CHECK(checker.slots_seen() == 600);
  CHECK(checker.users_completed() > 0);
}

TEST_CASE("handover slots pay exactly the interruption fraction") {
  SimConfig cfg = small_config(17, Strategy::Reactive);
  cfg.total_slots = 300;
  int handover_slots = 0;
  run_simulation(cfg, std::nullopt, nullptr, [&](const SlotAudit& a) {
    for (const auto& u : a.users) {
      if (!u.ap) continue;
      const double demand = u.dl_demand_mbps + u.ul_demand_mbps;
      const double factor = 1.0 - cfg.handover_interruption_s / cfg.slot_s;
      const double expected =
          std::min(u.share_mbps, demand) * (u.handover ? factor : 1.0);
      const double got = u.achieved_dl_mbps + u.achieved_ul_mbps;
      CHECK(got == doctest::Approx(expected).epsilon(1e-9));
      // the dl/ul split preserves the demand ratio
      if (got > 0.0)
        CHECK(u.achieved_ul_mbps / u.achieved_dl_mbps ==
              doctest::Approx(u.ul_demand_mbps / u.dl_demand_mbps).epsilon(1e-9));
      if (u.handover) ++handover_slots;
    }
  });
  CHECK(handover_slots > 0);  // the run actually exercised handovers
}

TEST_CASE("a fully dwelling world with zero noise has no handovers") {
  SimConfig cfg = small_config(23, Strategy::Reactive);
  cfg.channel.noise_sigma_db = 0.0;
  cfg.room_size_m = 60.0;
  cfg.speed_min_mps = 1.0;
  cfg.interarrival_mean_s = 40.0;
  cfg.total_slots = 500;
  cfg.poi_stay_min_s = 60.0;
  cfg.poi_stay_max_s = 100.0;

  struct SlotState {
    std::vector<int> users;
    bool all_dwelling = true;
    int handovers = 0;
  };
  std::vector<SlotState> states;
  run_simulation(cfg, std::nullopt, nullptr, [&](const SlotAudit& a) {
    SlotState st;
    for (const auto& u : a.users) {
      st.users.push_back(u.user_id);
      if (u.phase != Phase::Dwelling) st.all_dwelling = false;
      if (u.handover) ++st.handovers;
    }
    states.push_back(std::move(st));
  });

  // Whenever the whole world is static for two consecutive slots, the second
  // slot must not contain any handover.
  int static_pairs = 0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (states[i].all_dwelling && states[i - 1].all_dwelling &&
        states[i].users == states[i - 1].users && !states[i].users.empty()) {
      ++static_pairs;
      CHECK(states[i].handovers == 0);
    }
  }
  CHECK(static_pairs > 0);  // the property was actually exercised
}

TEST_CASE("predictions are graded against the tuples recorded later") {
  SimConfig cfg = small_config(29, Strategy::Predictive);
  cfg.total_slots = 260;
  cfg.warm_up_slots = 60;

  const int y_slots = cfg.predictor.output_slots;
  const int num_aps = cfg.num_aps;
  // user -> (slot -> rssi row); user -> (made_at -> prediction)
  std::map<int, std::map<long, std::vector<double>>> rssi_log;
  std::map<int, std::map<long, Matrix>> predictions;
  std::vector<std::pair<long, double>> reported;  // slot, mae

  std::vector<MetricsRecord> series;
  {
    Engine engine(cfg);
    engine.set_observer([&](const SlotAudit& a) {
      for (const auto& u : a.users) {
        rssi_log[u.user_id][a.slot] = u.rssi_dbm;
        if (u.prediction) predictions[u.user_id][a.slot] = *u.prediction;
      }
    });
    for (long t = 0; t < cfg.total_slots; ++t) {
      const MetricsRecord r = engine.run_slot();
      if (r.prediction_mae_db) reported.push_back({t, *r.prediction_mae_db});
      series.push_back(r);
    }
  }
  REQUIRE(!reported.empty());

  // Recompute the graded MAE stream from the logs alone.
  std::map<long, std::pair<double, int>> recomputed;  // grade slot -> (sum, n)
  for (const auto& [uid, preds] : predictions) {
    for (const auto& [made_at, pred] : preds) {
      const long grade_slot = made_at + y_slots - 1;
      const auto& log = rssi_log.at(uid);
      bool complete = true;
      double err = 0.0;
      for (int y = 0; y < y_slots; ++y) {
        const auto it = log.find(made_at + y);
        if (it == log.end()) {
          complete = false;
          break;
        }
        for (int j = 0; j < num_aps; ++j) err += std::abs(pred(y, 2 + j) - it->second[j]);
      }
      if (!complete) continue;  // user departed before the horizon finished
      auto& acc = recomputed[grade_slot];
      acc.first += err / (double(y_slots) * num_aps);
      acc.second += 1;
    }
  }
  for (const auto& [slot, mae] : reported) {
    const auto it = recomputed.find(slot);
    REQUIRE(it != recomputed.end());
    CHECK(mae == doctest::Approx(it->second.first / it->second.second).epsilon(1e-9));
  }
}

TEST_CASE("carrying a model in resumes training bit-exactly") {
  SimConfig cfg = small_config(31, Strategy::Predictive);
  cfg.total_slots = 250;
  cfg.warm_up_slots = 50;
  const RunResult full = run_simulation(cfg);

  // Same run split in two via an engine that keeps going.
  Engine engine(cfg);
  std::vector<MetricsRecord> series;
  for (long t = 0; t < cfg.total_slots; ++t) series.push_back(engine.run_slot());
  REQUIRE(full.model.has_value());
  const ModelState st = engine.model_state();
  CHECK(std::equal(st.net.params().begin(), st.net.params().end(),
                   full.model->net.params().begin()));

  // A fresh predictive engine carrying this model starts from its weights.
  SimConfig next = cfg;
  next.seed = 32;
  Engine resumed(next, std::nullopt, &st);
  CHECK(resumed.has_model());
  const ModelState carried = resumed.model_state();
  CHECK(std::equal(carried.net.params().begin(), carried.net.params().end(),
                   st.net.params().begin()));
  CHECK(carried.stats.count() == st.stats.count());
}

TEST_CASE("run_experiment: single cell equals run_simulation") {
  ExperimentSpec spec;
  spec.base = small_config(41, Strategy::Reactive);
  spec.seeds = {41};
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].ok);
  CHECK(rows[0].cell_key == "-");
  const RunResult direct = run_simulation(rows[0].cfg);
  CHECK(rows[0].summary.mean_tput_all_mbps ==
        doctest::Approx(direct.summary.mean_tput_all_mbps));
  CHECK(rows[0].summary.total_handovers == direct.summary.total_handovers);
}

TEST_CASE("run_experiment: grid size, ordering and partial failure") {
  ExperimentSpec spec;
  spec.base = small_config(1, Strategy::Reactive);
  spec.base.total_slots = 60;
  spec.seeds = {1, 2};
  spec.axes = {{"sim.interarrival_mean_s", {"5", "10", "-1"}}};  // last value invalid
  const auto rows = run_experiment(spec);
  CHECK(rows.size() == 6);  // 3 cells x 2 seeds
  int failed = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      ++failed;
      CHECK(r.error.find("interarrival") != std::string::npos);
    }
  }
  CHECK(failed == 2);  // the invalid cell fails for both seeds, others survive
  CHECK(std::is_sorted(rows.begin(), rows.end(), [](const CellResult& a, const CellResult& b) {
    return std::tie(a.cell_key, a.seed) < std::tie(b.cell_key, b.seed);
  }));

  const auto aggs = aggregate_cells(rows);
  CHECK(aggs.size() == 2);  // failed cell contributes no aggregate
  for (const auto& a : aggs) CHECK(a.n_seeds == 2);
}

TEST_CASE("metrics csv schema is stable") {
  CHECK(metrics_csv_header() ==
        "slot,active_users,connected_users,mean_tput_all_mbps,mean_tput_connected_mbps,"
        "handovers,cumulative_handovers,prediction_mae_db,training_loss");
  CHECK(tuples_csv_header(2) == "run_id,slot,user_id,dl_mbps,ul_mbps,rssi_0,rssi_1,ap_id,"
                                "handover_flag");
  CHECK(summary_csv_header() ==
        "cell_key,seed,status,error,policy,mode,threshold_mbps,interarrival_s,total_slots,"
        "warm_up_slots,num_aps,mean_tput_all_mbps,mean_tput_connected_mbps,total_handovers,"
        "post_warmup_handovers,final_window_mae_db,final_window_loss,peak_active_users");
  MetricsRecord r;
  r.slot = 5;
  r.active_users = 2;
  r.connected_users = 1;
  r.mean_tput_all_mbps = 123.456;
  r.mean_tput_connected_mbps = 246.912;
  r.handovers = 1;
  r.cumulative_handovers = 7;
  CHECK(metrics_csv_row(r) == "5,2,1,123.456,246.912,1,7,,");
}

TEST_CASE("cumulative handovers never decrease and counters match") {
  SimConfig cfg = small_config(47, Strategy::Reactive);
  const RunResult res = run_simulation(cfg);
  long cum = 0;
  for (const auto& r : res.series) {
    cum += r.handovers;
    CHECK(r.cumulative_handovers == cum);
  }
  CHECK(res.summary.total_handovers == cum);
}
