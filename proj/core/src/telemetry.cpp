#include "wigig/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wigig {

void tuple_to_row(const UserTuple& t, Matrix& m, int row) {
  m(row, 0) = t.dl_mbps;
  m(row, 1) = t.ul_mbps;
  for (std::size_t p = 0; p < t.rssi_dbm.size(); ++p)
    m(row, 2 + static_cast<int>(p)) = t.rssi_dbm[p];
}

History::History(int user_id, int capacity) : user_id_(user_id), capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("History: capacity must be >= 1");
}

void History::record(UserTuple t) {
  if (!ring_.empty() && t.slot != ring_.back().slot + 1)
    throw std::logic_error("History::record: slot " + std::to_string(t.slot) +
                           " does not follow " + std::to_string(ring_.back().slot));
  ring_.push_back(std::move(t));
  if (ring_.size() > capacity_) ring_.pop_front();
}

std::optional<Matrix> History::input_window(int input_slots) const {
  if (static_cast<int>(ring_.size()) < input_slots) return std::nullopt;
  const int features = ring_.back().feature_count();
  Matrix m(input_slots, features);
  const std::size_t start = ring_.size() - input_slots;
  for (int r = 0; r < input_slots; ++r) tuple_to_row(ring_[start + r], m, r);
  return m;
}

std::optional<History::TrainingSample> History::training_pair(int input_slots,
                                                              int output_slots) const {
  const int need = input_slots + output_slots;
  if (static_cast<int>(ring_.size()) < need) return std::nullopt;
  const int features = ring_.back().feature_count();
  TrainingSample ts{Matrix(input_slots, features), Matrix(output_slots, features)};
  const std::size_t start = ring_.size() - need;
  for (int r = 0; r < input_slots; ++r) tuple_to_row(ring_[start + r], ts.input, r);
  for (int r = 0; r < output_slots; ++r)
    tuple_to_row(ring_[start + input_slots + r], ts.target, r);
  return ts;
}

NormStats::NormStats(int features) : sum_(features, 0.0), sum_sq_(features, 0.0) {
  if (features < 1) throw std::invalid_argument("NormStats: features must be >= 1");
}

void NormStats::observe(const UserTuple& t) {
  if (t.feature_count() != features())
    throw std::logic_error("NormStats::observe: feature count mismatch");
  auto add = [this](int f, double v) {
    sum_[f] += v;
    sum_sq_[f] += v * v;
  };
  add(0, t.dl_mbps);
  add(1, t.ul_mbps);
  for (std::size_t p = 0; p < t.rssi_dbm.size(); ++p) add(2 + static_cast<int>(p), t.rssi_dbm[p]);
  ++count_;
}

double NormStats::mean(int f) const { return count_ ? sum_[f] / count_ : 0.0; }

double NormStats::stddev(int f) const {
  if (!count_) return 1.0;
  const double m = mean(f);
  const double var = std::max(0.0, sum_sq_[f] / count_ - m * m);
  return std::max(std::sqrt(var), 1e-6);
}

void NormStats::require_ready() const {
  if (count_ < 2) throw std::logic_error("NormStats: need at least 2 observations");
}

Matrix NormStats::normalize(const Matrix& m) const {
  require_ready();
  if (m.cols != features()) throw std::logic_error("NormStats::normalize: feature mismatch");
  Matrix out(m.rows, m.cols);
  for (int c = 0; c < m.cols; ++c) {
    const double mu = mean(c);
    const double inv = 1.0 / stddev(c);
    for (int r = 0; r < m.rows; ++r) out(r, c) = (m(r, c) - mu) * inv;
  }
  return out;
}

Matrix NormStats::denormalize(const Matrix& m) const {
  require_ready();
  if (m.cols != features()) throw std::logic_error("NormStats::denormalize: feature mismatch");
  Matrix out(m.rows, m.cols);
  for (int c = 0; c < m.cols; ++c) {
    const double mu = mean(c);
    const double sd = stddev(c);
    for (int r = 0; r < m.rows; ++r) out(r, c) = m(r, c) * sd + mu;
  }
  return out;
}

void NormStats::restore(long long count, std::vector<double> sum, std::vector<double> sum_sq) {
  if (sum.size() != sum_.size() || sum_sq.size() != sum_sq_.size())
    throw std::invalid_argument("NormStats::restore: feature count mismatch");
  count_ = count;
  sum_ = std::move(sum);
  sum_sq_ = std::move(sum_sq);
}

}  // namespace wigig
