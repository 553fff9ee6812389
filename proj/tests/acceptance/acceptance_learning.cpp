// Online-learning quality at the standard configuration: a single long
// predictive-greedy run must reach a low steady-state RSSI prediction error
// and still be learning visibly when prediction-driven association begins.

#include <cstdarg>
#include <optional>
#include <vector>

#include "acceptance.hpp"
#include "wigig/engine.hpp"

using namespace wigig;
using namespace wigig::test;

namespace {

struct Window {
  long lo, hi;  // [lo, hi)
  std::optional<double> mae(const std::vector<MetricsRecord>& series) const {
    double sum = 0.0;
    long n = 0;
    for (const auto& r : series) {
      if (r.slot < lo || r.slot >= hi || !r.prediction_mae_db) continue;
      sum += *r.prediction_mae_db;
      ++n;
    }
    if (!n) return std::nullopt;
    return sum / n;
  }
  std::optional<double> loss(const std::vector<MetricsRecord>& series) const {
    double sum = 0.0;
    long n = 0;
    for (const auto& r : series) {
      if (r.slot < lo || r.slot >= hi || !r.training_loss) continue;
      sum += *r.training_loss;
      ++n;
    }
    if (!n) return std::nullopt;
    return sum / n;
  }
};

}  // namespace

int main() {
  CriterionReport report;

  SimConfig cfg;  // the standard evaluation defaults
  cfg.seed = 1;
  cfg.policy = {Strategy::Predictive, Mode::Greedy, 200.0};
  cfg.total_slots = 20000;
  cfg.warm_up_slots = 5000;

  const RunResult res = run_simulation(cfg);

  const auto early = Window{5000, 6000}.mae(res.series);
  const auto late = Window{15000, 20000}.mae(res.series);
  if (!early || !late) {
    report.record("criterion 1 (prediction learning)", false,
                  "missing prediction error samples in the required windows");
    return report.exit_code();
  }
  const bool below_abs = *late < 5.0;
  const bool halved = *late < 0.5 * *early;
  report.record("criterion 1a (steady-state error < 5 dB)", below_abs,
                fmt("RSSI MAE over slots 15000-20000: %.3f dB", *late));
  report.record("criterion 1b (error halves after early window)", halved,
                fmt("RSSI MAE %.3f dB (slots 5000-6000) -> %.3f dB (slots 15000-20000), "
                    "ratio %.2f (bound 0.50)",
                    *early, *late, *late / *early));

  // companion check: the training loss keeps descending across the run
  const auto loss_early = Window{1000, 2000}.loss(res.series);
  const auto loss_late = Window{9000, 10000}.loss(res.series);
  const bool loss_down = loss_early && loss_late && *loss_late < *loss_early;
  report.record("criterion 1c (training loss trend)", loss_down,
                loss_early && loss_late
                    ? fmt("mean loss %.4f (slots 1000-2000) -> %.4f (slots 9000-10000)",
                          *loss_early, *loss_late)
                    : std::string("missing training loss samples"));

  return report.exit_code();
}
