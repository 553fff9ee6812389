#include "wigig/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace wigig {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_double_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

std::string metrics_csv_header() {
  return "slot,active_users,connected_users,mean_tput_all_mbps,mean_tput_connected_mbps,"
         "handovers,cumulative_handovers,prediction_mae_db,training_loss";
}

std::string metrics_csv_row(const MetricsRecord& r) {
  std::string row;
  row += std::to_string(r.slot);
  row += "," + std::to_string(r.active_users);
  row += "," + std::to_string(r.connected_users);
  row += "," + format_double(r.mean_tput_all_mbps);
  row += "," + format_double(r.mean_tput_connected_mbps);
  row += "," + std::to_string(r.handovers);
  row += "," + std::to_string(r.cumulative_handovers);
  row += "," + opt(r.prediction_mae_db);
  row += "," + opt(r.training_loss);
  return row;
}

void write_metrics_csv(const std::vector<MetricsRecord>& series, const std::string& path) {
  auto out = open_out(path);
  out << metrics_csv_header() << "\n";
  for (const auto& r : series) out << metrics_csv_row(r) << "\n";
}

std::string tuples_csv_header(int num_aps) {
  std::string h = "run_id,slot,user_id,dl_mbps,ul_mbps";
  for (int j = 0; j < num_aps; ++j) h += ",rssi_" + std::to_string(j);
  h += ",ap_id,handover_flag";
  return h;
}

std::string summary_csv_header() {
  return "cell_key,seed,status,error,policy,mode,threshold_mbps,interarrival_s,total_slots,"
         "warm_up_slots,num_aps,mean_tput_all_mbps,mean_tput_connected_mbps,total_handovers,"
         "post_warmup_handovers,final_window_mae_db,final_window_loss,peak_active_users";
}

std::string summary_csv_row(const CellResult& r) {
  std::string row;
  row += r.cell_key;
  row += "," + std::to_string(r.seed);
  row += r.ok ? ",ok" : ",failed";
  std::string err = r.error;
  for (auto& c : err)
    if (c == ',' || c == '\n') c = ';';
  row += "," + err;
  row += "," + to_string(r.cfg.policy.strategy);
  row += "," + to_string(r.cfg.policy.mode);
  row += "," + format_double(r.cfg.policy.threshold_mbps);
  row += "," + format_double(r.cfg.interarrival_mean_s);
  row += "," + std::to_string(r.cfg.total_slots);
  row += "," + std::to_string(r.cfg.warm_up_slots);
  row += "," + std::to_string(r.cfg.num_aps);
  row += "," + format_double(r.summary.mean_tput_all_mbps);
  row += "," + format_double(r.summary.mean_tput_connected_mbps);
  row += "," + std::to_string(r.summary.total_handovers);
  row += "," + std::to_string(r.summary.post_warmup_handovers);
  row += "," + opt(r.summary.final_window_mae_db);
  row += "," + opt(r.summary.final_window_loss);
  row += "," + format_double(r.summary.peak_active_users);
  return row;
}

void write_summary_csv(const std::vector<CellResult>& rows, const std::string& path) {
  auto out = open_out(path);
  out << summary_csv_header() << "\n";
  for (const auto& r : rows) out << summary_csv_row(r) << "\n";
}

std::string aggregate_csv_header() {
  return "cell_key,n_seeds,tput_all_mean,tput_all_std,tput_connected_mean,tput_connected_std,"
         "handovers_mean,handovers_std,final_window_mae_mean,final_window_mae_std";
}

void write_aggregate_csv(const std::vector<CellAggregate>& rows, const std::string& path) {
  auto out = open_out(path);
  out << aggregate_csv_header() << "\n";
  for (const auto& a : rows) {
    out << a.cell_key << "," << a.n_seeds << "," << format_double(a.tput_all_mean) << ","
        << format_double(a.tput_all_std) << "," << format_double(a.tput_connected_mean) << ","
        << format_double(a.tput_connected_std) << "," << format_double(a.handovers_mean) << ","
        << format_double(a.handovers_std) << "," << opt(a.mae_mean) << "," << opt(a.mae_std)
        << "\n";
  }
}

struct TupleLogWriter::Impl {
  std::ofstream out;
  std::string run_id;
  int num_aps;
};

TupleLogWriter::TupleLogWriter(const std::string& path, const std::string& run_id, int num_aps)
    : impl_(new Impl{open_out(path), run_id, num_aps}) {
  impl_->out << tuples_csv_header(num_aps) << "\n";
}

TupleLogWriter::~TupleLogWriter() = default;

void TupleLogWriter::forward(const SlotAudit& audit) {
  auto& out = impl_->out;
  for (const auto& u : audit.users) {
    out << impl_->run_id << "," << audit.slot << "," << u.user_id << ","
        << format_double(u.achieved_dl_mbps) << "," << format_double(u.achieved_ul_mbps);
    for (double r : u.rssi_dbm) out << "," << format_double(r);
    out << "," << (u.ap ? std::to_string(*u.ap) : std::string("-1")) << ","
        << (u.handover ? "1" : "0") << "\n";
  }
}

SlotObserver TupleLogWriter::observer() {
  return [this](const SlotAudit& a) { forward(a); };
}

}  // namespace wigig
