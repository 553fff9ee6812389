#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "wigig/channel.hpp"
#include "wigig/policy.hpp"
#include "wigig/predictor.hpp"
#include "wigig/rng.hpp"
#include "wigig/scenario.hpp"
#include "wigig/telemetry.hpp"

using namespace wigig;

namespace {

struct TrainFixture {
  Architecture arch = Architecture::defaults(25, 6, 10);
  ConvNet net;
  NormStats stats{6};
  std::vector<History> histories;
  std::vector<const History*> ptrs;
  Scratch scratch;

  explicit TrainFixture(int n_users) : net(make_net()) {
    Rng data(2);
    for (int u = 0; u < n_users; ++u) {
      History h(u, 35);
      for (int s = 0; s < 35; ++s) {
        UserTuple t{s, data.uniform(0, 500), data.uniform(0, 50), {}};
        for (int p = 0; p < 4; ++p) t.rssi_dbm.push_back(data.uniform(-80, -30));
        stats.observe(t);
        h.record(t);
      }
      histories.push_back(std::move(h));
    }
    for (auto& h : histories) ptrs.push_back(&h);
  }

  ConvNet make_net() {
    Rng rng(1);
    return ConvNet::init(Architecture::defaults(25, 6, 10), rng);
  }
};

}  // namespace

static void BM_Forward(benchmark::State& state) {
  TrainFixture fx(1);
  const Matrix in = *fx.histories[0].input_window(25);
  const Matrix normed = fx.stats.normalize(in);
  std::vector<double> out;
  for (auto _ : state) {
    fx.net.forward(normed, fx.scratch, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Forward);

static void BM_BackwardAndUpdate(benchmark::State& state) {
  TrainFixture fx(1);
  const auto pair = fx.histories[0].training_pair(25, 10);
  const Matrix in = fx.stats.normalize(pair->input);
  const Matrix tgt = fx.stats.normalize(pair->target);
  std::vector<double> grad;
  for (auto _ : state) {
    fx.net.backward(in, tgt, fx.scratch, grad);
    fx.net.apply_sgd(grad, 1e-3, 0.9);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_BackwardAndUpdate);

static void BM_OnlineTrainStep(benchmark::State& state) {
  TrainFixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        online_train_step(fx.net, fx.stats, fx.ptrs, 1e-3, 0.9, fx.scratch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OnlineTrainStep)->Arg(10)->Arg(20)->Arg(40);

static void BM_RssiSample(benchmark::State& state) {
  ChannelParams params;
  Rng rng(3);
  const AccessPoint ap{0, {150.0, 150.0}};
  const Vec2 pos{10.0, 20.0};
  for (auto _ : state) benchmark::DoNotOptimize(rssi_dbm(ap, pos, params, rng));
}
BENCHMARK(BM_RssiSample);

static void BM_AssociatePass(benchmark::State& state) {
  const int n_users = static_cast<int>(state.range(0));
  Rng rng(4);
  std::vector<UserForecast> fcs;
  std::map<int, int> current;
  for (int u = 0; u < n_users; ++u) {
    UserForecast fc;
    fc.user_id = u;
    for (int j = 0; j < 4; ++j) {
      std::vector<double> rates(10);
      for (auto& r : rates) r = rng.uniform(0, 8085);
      fc.ap_rates.push_back(std::move(rates));
    }
    fcs.push_back(std::move(fc));
    current[u] = rng.uniform_int(0, 3);
  }
  const PolicyKind kind{Strategy::Predictive, Mode::Greedy, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(associate(fcs, current, kind, 4));
}
BENCHMARK(BM_AssociatePass)->Arg(20)->Arg(80);

BENCHMARK_MAIN();
