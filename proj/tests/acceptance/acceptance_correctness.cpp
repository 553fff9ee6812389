// Gradient correctness, association-algorithm oracle equivalence, the
// conservation/legality fuzz run, and the linear-training-cost spot check.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <map>
#include <vector>

#include "../support/checkers.hpp"
#include "../support/oracles.hpp"
#include "acceptance.hpp"
#include "wigig/engine.hpp"

using namespace wigig;
using namespace wigig::test;

namespace {

// criterion: every backprop gradient matches central finite differences
// (h = 1e-4) with relative error < 1e-4 on 3 random small architectures.
void gradient_correctness(CriterionReport& report) {
  Rng arch_rng(9001);
  double worst_overall = 0.0;
  int checked = 0;
  for (int k = 0; k < 3; ++k) {
    Architecture a;
    a.features = arch_rng.uniform_int(2, 4);
    a.input_slots = arch_rng.uniform_int(8, 14);
    a.output_slots = arch_rng.uniform_int(2, 4);
    const int n_conv = arch_rng.uniform_int(0, 2);
    int len = a.input_slots;
    for (int c = 0; c < n_conv; ++c) {
      ConvLayerSpec spec;
      spec.filters = arch_rng.uniform_int(2, 5);
      spec.kernel = std::min(len, arch_rng.uniform_int(2, 4));
      spec.stride = 1;
      len = len - spec.kernel + 1;
      spec.pool = (len >= 4 && arch_rng.bernoulli(0.5)) ? 2 : 1;
      len /= spec.pool;
      a.conv.push_back(spec);
    }
    if (arch_rng.bernoulli(0.7)) a.dense.push_back(arch_rng.uniform_int(4, 12));

    ConvNet net(a);
    // random parameters: zero-init biases would park rectifier
    // pre-activations exactly on the kink
    for (auto& p : net.mutable_params()) p = arch_rng.uniform(-0.6, 0.6);
    Matrix in(a.input_slots, a.features), tgt(a.output_slots, a.features);
    for (auto& v : in.data) v = arch_rng.uniform(-1.5, 1.5);
    for (auto& v : tgt.data) v = arch_rng.uniform(-1.5, 1.5);

    Scratch s;
    std::vector<double> grad;
    net.backward(in, tgt, s, grad);
    const auto fd = fd_gradient(net, in, tgt, 1e-4);
    for (std::size_t i = 0; i < grad.size(); ++i)
      worst_overall = std::max(worst_overall, rel_err(grad[i], fd[i]));
    checked += static_cast<int>(grad.size());
  }
  report.record("criterion 5 (gradient correctness)", worst_overall < 1e-4,
                fmt("%d parameters over 3 random architectures, worst relative error %.3g "
                    "(bound 1e-4)",
                    checked, worst_overall));
}

// criterion: associate() equals an independently coded sequential-argmax
// oracle on 1000 random instances with N<=5, P<=3, Y<=3, theta in {0,200}.
void association_oracle(CriterionReport& report) {
  Rng rng(424242);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int num_aps = rng.uniform_int(1, 3);
    const int n_users = rng.uniform_int(1, 5);
    const int horizon = rng.uniform_int(1, 3);
    std::vector<UserForecast> fcs;
    std::map<int, int> current;
    for (int u = 0; u < n_users; ++u) {
      UserForecast fc;
      fc.user_id = u;
      for (int j = 0; j < num_aps; ++j) {
        std::vector<double> rates(horizon);
        for (auto& r : rates) r = rng.bernoulli(0.15) ? 0.0 : rng.uniform(0.0, 8085.0);
        fc.ap_rates.push_back(std::move(rates));
      }
      fcs.push_back(std::move(fc));
      if (rng.bernoulli(0.6)) current[u] = rng.uniform_int(0, num_aps - 1);
    }
    for (const double theta : {0.0, 200.0}) {
      const PolicyKind kind{Strategy::Predictive,
                            theta == 0.0 ? Mode::Greedy : Mode::Conservative, theta};
      const AssociationPlan got = associate(fcs, current, kind, num_aps);
      const AssociationPlan want = reference_associate(fcs, current, theta, num_aps);
      if (got.assignment != want.assignment || got.handovers != want.handovers ||
          got.ap_load != want.ap_load)
        ++mismatches;
    }
  }
  report.record("criterion 6 (association oracle equivalence)", mismatches == 0,
                fmt("1000 instances x {0,200} Mbps thresholds, %d mismatches", mismatches));
}

// criterion: airtime, throughput legality, phase machine and itinerary
// compatibility over a 5000-slot fuzz run, zero violations.
void conservation_fuzz(CriterionReport& report) {
  SimConfig cfg;
  cfg.seed = 90210;
  cfg.total_slots = 5000;
  cfg.warm_up_slots = 1000;
  cfg.policy = {Strategy::Predictive, Mode::Greedy, 200.0};

  Engine probe(cfg);
  InvariantChecker checker(probe.scenario(), cfg);
  run_simulation(cfg, std::nullopt, nullptr,
                 [&checker](const SlotAudit& a) { checker.on_slot(a); });
  checker.finalize();

  // a second, conservative-reactive run for policy diversity
  SimConfig cfg2 = cfg;
  cfg2.seed = 31337;
  cfg2.total_slots = 2000;
  cfg2.policy = {Strategy::Reactive, Mode::Conservative, 200.0};
  Engine probe2(cfg2);
  InvariantChecker checker2(probe2.scenario(), cfg2);
  run_simulation(cfg2, std::nullopt, nullptr,
                 [&checker2](const SlotAudit& a) { checker2.on_slot(a); });
  checker2.finalize();

  const std::size_t violations = checker.violations().size() + checker2.violations().size();
  std::string detail = fmt("%ld+%ld slots, %ld+%ld users completed, %zu violations",
                           checker.slots_seen(), checker2.slots_seen(),
                           checker.users_completed(), checker2.users_completed(), violations);
  if (violations) detail += "; first: " + (checker.violations().empty()
                                               ? checker2.violations().front()
                                               : checker.violations().front());
  report.record("criterion 7 (conservation and legality fuzz)", violations == 0, detail);
}

// criterion: per-slot training wall time at N=40 is at most 5x that at N=10.
void linear_training_cost(CriterionReport& report) {
  const Architecture arch = Architecture::defaults(25, 6, 10);

  auto build = [&](int n_users, std::vector<History>& hists, NormStats& stats) {
    Rng data(7);
    for (int u = 0; u < n_users; ++u) {
      History h(u, 35);
      for (int s = 0; s < 35; ++s) {
        UserTuple t{s, data.uniform(0, 500), data.uniform(0, 50), {}};
        for (int p = 0; p < 4; ++p) t.rssi_dbm.push_back(data.uniform(-80, -30));
        stats.observe(t);
        h.record(t);
      }
      hists.push_back(std::move(h));
    }
  };

  auto median_slot_ms = [&](int n_users) {
    std::vector<History> hists;
    NormStats stats(6);
    build(n_users, hists, stats);
    std::vector<const History*> ptrs;
    for (auto& h : hists) ptrs.push_back(&h);
    Rng init(1);
    ConvNet net = ConvNet::init(arch, init);
    Scratch s;
    online_train_step(net, stats, ptrs, 1e-3, 0.9, s);  // warm caches
    std::vector<double> times;
    for (int rep = 0; rep < 31; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      online_train_step(net, stats, ptrs, 1e-3, 0.9, s);
      times.push_back(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count());
    }
    std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
    return times[times.size() / 2];
  };

  const double t10 = median_slot_ms(10);
  const double t20 = median_slot_ms(20);
  const double t40 = median_slot_ms(40);
  const double ratio = t40 / t10;
  report.record("criterion 9 (training cost linear in users)", ratio <= 5.0,
                fmt("per-slot training: N=10 %.2f ms, N=20 %.2f ms, N=40 %.2f ms; "
                    "N=40/N=10 ratio %.2f (bound 5)",
                    t10, t20, t40, ratio));
}

}  // namespace

int main() {
  CriterionReport report;
  gradient_correctness(report);
  association_oracle(report);
  conservation_fuzz(report);
  linear_training_cost(report);
  return report.exit_code();
}
