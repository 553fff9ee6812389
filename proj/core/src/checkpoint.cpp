#include "wigig/checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wigig {

namespace {

constexpr char kMagic[8] = {'W', 'G', 'C', 'P', '0', '0', '0', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

void put_doubles(std::ostream& out, std::span<const double> v) {
  put<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::istream& in) {
  const auto n = get<std::uint64_t>(in);
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint: truncated tensor");
  return v;
}

}  // namespace

void save_checkpoint(const ModelState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof kMagic);

  const Architecture& a = state.net.arch();
  put<std::int32_t>(out, a.input_slots);
  put<std::int32_t>(out, a.features);
  put<std::int32_t>(out, a.output_slots);
  put<std::int32_t>(out, static_cast<std::int32_t>(a.conv.size()));
  for (const auto& c : a.conv) {
    put<std::int32_t>(out, c.filters);
    put<std::int32_t>(out, c.kernel);
    put<std::int32_t>(out, c.stride);
    put<std::int32_t>(out, c.pool);
  }
  put<std::int32_t>(out, static_cast<std::int32_t>(a.dense.size()));
  for (int w : a.dense) put<std::int32_t>(out, w);

  put_doubles(out, state.net.params());
  put_doubles(out, state.net.momentum());
  put<std::uint64_t>(out, state.net.steps());

  put<std::int32_t>(out, state.stats.features());
  put<std::int64_t>(out, state.stats.count());
  for (int f = 0; f < state.stats.features(); ++f) put<double>(out, state.stats.sum(f));
  for (int f = 0; f < state.stats.features(); ++f) put<double>(out, state.stats.sum_sq(f));
  if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

ModelState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);

  Architecture a;
  a.input_slots = get<std::int32_t>(in);
  a.features = get<std::int32_t>(in);
  a.output_slots = get<std::int32_t>(in);
  const int n_conv = get<std::int32_t>(in);
  for (int i = 0; i < n_conv; ++i) {
    ConvLayerSpec c;
    c.filters = get<std::int32_t>(in);
    c.kernel = get<std::int32_t>(in);
    c.stride = get<std::int32_t>(in);
    c.pool = get<std::int32_t>(in);
    a.conv.push_back(c);
  }
  const int n_dense = get<std::int32_t>(in);
  for (int i = 0; i < n_dense; ++i) a.dense.push_back(get<std::int32_t>(in));

  ConvNet net(a);
  auto params = get_doubles(in);
  auto momentum = get_doubles(in);
  const auto steps = get<std::uint64_t>(in);
  net.restore(std::move(params), std::move(momentum), steps);

  const int features = get<std::int32_t>(in);
  NormStats stats(features);
  const auto count = get<std::int64_t>(in);
  std::vector<double> sum(features), sum_sq(features);
  for (int f = 0; f < features; ++f) sum[f] = get<double>(in);
  for (int f = 0; f < features; ++f) sum_sq[f] = get<double>(in);
  stats.restore(count, std::move(sum), std::move(sum_sq));

  return ModelState{std::move(net), std::move(stats)};
}

std::string checkpoint_summary(const ModelState& state) {
  const Architecture& a = state.net.arch();
  std::ostringstream o;
  o << "architecture: input " << a.input_slots << "x" << a.features << " -> output "
    << a.output_slots << "x" << a.features << "\n";
  for (std::size_t i = 0; i < a.conv.size(); ++i)
    o << "  conv[" << i << "]: filters=" << a.conv[i].filters << " kernel=" << a.conv[i].kernel
      << " stride=" << a.conv[i].stride << " pool=" << a.conv[i].pool << "\n";
  for (std::size_t i = 0; i < a.dense.size(); ++i)
    o << "  dense[" << i << "]: width=" << a.dense[i] << "\n";
  o << "parameters: " << state.net.param_count() << "\n";
  o << "sgd steps: " << state.net.steps() << "\n";

  double l2 = 0.0;
  for (double p : state.net.params()) l2 += p * p;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", std::sqrt(l2));
  o << "parameter l2 norm: " << buf << "\n";

  o << "normalization: " << state.stats.count() << " observations over "
    << state.stats.features() << " features\n";
  for (int f = 0; f < state.stats.features(); ++f) {
    std::snprintf(buf, sizeof buf, "%.6g", state.stats.mean(f));
    o << "  feature " << f << ": mean=" << buf;
    std::snprintf(buf, sizeof buf, "%.6g", state.stats.stddev(f));
    o << " stddev=" << buf << "\n";
  }
  return o.str();
}

}  // namespace wigig
