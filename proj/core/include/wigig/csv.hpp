#ifndef WIGIG_CSV_HPP
#define WIGIG_CSV_HPP

#include <string>
#include <vector>

#include "wigig/engine.hpp"

namespace wigig {

// Column layouts are part of the tool's stable interface; tests pin them.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& r);
void write_metrics_csv(const std::vector<MetricsRecord>& series, const std::string& path);

std::string tuples_csv_header(int num_aps);
std::string summary_csv_header();
std::string summary_csv_row(const CellResult& r);
void write_summary_csv(const std::vector<CellResult>& rows, const std::string& path);
std::string aggregate_csv_header();
void write_aggregate_csv(const std::vector<CellAggregate>& rows, const std::string& path);

/// Streams one tuples.csv row per active user per slot; attach as the
/// engine's slot observer (or call forward() from a composite observer).
class TupleLogWriter {
 public:
  TupleLogWriter(const std::string& path, const std::string& run_id, int num_aps);
  ~TupleLogWriter();
  TupleLogWriter(const TupleLogWriter&) = delete;
  TupleLogWriter& operator=(const TupleLogWriter&) = delete;

  void forward(const SlotAudit& audit);
  SlotObserver observer();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string format_double(double v);        // compact, deterministic
std::string format_double_exact(double v);  // round-trips bit-exactly

}  // namespace wigig

#endif  // WIGIG_CSV_HPP
