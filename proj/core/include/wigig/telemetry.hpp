#ifndef WIGIG_TELEMETRY_HPP
#define WIGIG_TELEMETRY_HPP

#include <deque>
#include <optional>
#include <vector>

#include "wigig/matrix.hpp"

namespace wigig {

/// One per-user per-slot telemetry record: achieved traffic plus the RSSI to
/// every AP. Traffic is zero for slots where the user was unassociated; the
/// RSSI vector is always present.
struct UserTuple {
  long slot = 0;
  double dl_mbps = 0.0;
  double ul_mbps = 0.0;
  std::vector<double> rssi_dbm;  // one entry per AP

  int feature_count() const { return 2 + static_cast<int>(rssi_dbm.size()); }
};

/// Feature order shared by histories, training samples and predictions:
/// [dl, ul, rssi_0 .. rssi_{P-1}].
void tuple_to_row(const UserTuple& t, Matrix& m, int row);

/// Sliding per-user ring of the most recent input+output window of tuples.
class History {
 public:
  History(int user_id, int capacity);

  /// Appends the next slot's tuple. Throws std::logic_error on a slot gap or
  /// duplicate.
  void record(UserTuple t);

  /// Newest `input_slots` tuples as a matrix (rows oldest->newest), or
  /// nullopt if fewer exist.
  std::optional<Matrix> input_window(int input_slots) const;

  /// Oldest-X/newest-Y split of a full ring: input rows are the tuples
  /// preceding the target rows. nullopt until input+output tuples exist.
  struct TrainingSample {
    Matrix input;
    Matrix target;
  };
  std::optional<TrainingSample> training_pair(int input_slots, int output_slots) const;

  int user_id() const { return user_id_; }
  std::size_t size() const { return ring_.size(); }
  long newest_slot() const { return ring_.back().slot; }
  const UserTuple& at(std::size_t i) const { return ring_[i]; }
  const UserTuple& from_back(std::size_t i) const { return ring_[ring_.size() - 1 - i]; }

 private:
  int user_id_;
  std::size_t capacity_;
  std::deque<UserTuple> ring_;
};

/// Per-feature running mean/variance over observed tuples, shared by all
/// users. Feature order matches tuple_to_row.
class NormStats {
 public:
  explicit NormStats(int features);

  void observe(const UserTuple& t);

  long long count() const { return count_; }
  int features() const { return static_cast<int>(sum_.size()); }
  double mean(int f) const;
  double stddev(int f) const;  // floored at 1e-6

  /// Per-feature z-score. Throws std::logic_error with fewer than two
  /// observations.
  Matrix normalize(const Matrix& m) const;
  Matrix denormalize(const Matrix& m) const;

  // Raw accumulators, exposed for checkpointing.
  double sum(int f) const { return sum_[f]; }
  double sum_sq(int f) const { return sum_sq_[f]; }
  void restore(long long count, std::vector<double> sum, std::vector<double> sum_sq);

 private:
  void require_ready() const;

  long long count_ = 0;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
};

}  // namespace wigig

#endif  // WIGIG_TELEMETRY_HPP
