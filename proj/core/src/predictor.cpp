#include "wigig/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wigig {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

Architecture Architecture::defaults(int input_slots, int features, int output_slots) {
  Architecture a;
  a.input_slots = input_slots;
  a.features = features;
  a.output_slots = output_slots;
  a.conv = {{16, 5, 1, 2}, {32, 3, 1, 1}};
  a.dense = {128};
  return a;
}

void ConvNet::build_plan() {
  const auto& a = arch_;
  if (a.input_slots < 1) throw std::invalid_argument("predictor.input_slots must be >= 1");
  if (a.features < 1) throw std::invalid_argument("predictor features must be >= 1");
  if (a.output_slots < 1) throw std::invalid_argument("predictor.output_slots must be >= 1");

  stages_.clear();
  std::size_t off = 0;
  int len = a.input_slots;
  int ch = a.features;
  for (std::size_t i = 0; i < a.conv.size(); ++i) {
    const auto& c = a.conv[i];
    const std::string where = "predictor conv layer " + std::to_string(i);
    if (c.filters < 1 || c.kernel < 1 || c.stride < 1 || c.pool < 1)
      throw std::invalid_argument(where + ": filters/kernel/stride/pool must be >= 1");
    if (c.kernel > len)
      throw std::invalid_argument(where + ": kernel " + std::to_string(c.kernel) +
                                  " exceeds temporal length " + std::to_string(len));
    StageInfo s;
    s.is_conv = true;
    s.in_len = len;
    s.in_ch = ch;
    s.filters = c.filters;
    s.kernel = c.kernel;
    s.stride = c.stride;
    s.pool = c.pool;
    s.conv_len = (len - c.kernel) / c.stride + 1;
    s.out_len = s.conv_len / c.pool;
    if (s.out_len < 1) throw std::invalid_argument(where + ": pooling collapses the signal");
    s.out_ch = c.filters;
    s.w_count = static_cast<std::size_t>(c.filters) * ch * c.kernel;
    s.b_count = c.filters;
    s.w_off = off;
    s.b_off = off + s.w_count;
    s.out_size = s.out_len * s.out_ch;
    off += s.w_count + s.b_count;
    stages_.push_back(s);
    len = s.out_len;
    ch = c.filters;
  }

  int width = len * ch;  // flattened conv output (or raw input)
  std::vector<int> widths = a.dense;
  widths.push_back(a.output_size());
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (widths[i] < 1) throw std::invalid_argument("predictor dense widths must be >= 1");
    StageInfo s;
    s.is_conv = false;
    s.in_width = width;
    s.out_width = widths[i];
    s.w_count = static_cast<std::size_t>(widths[i]) * width;
    s.b_count = widths[i];
    s.w_off = off;
    s.b_off = off + s.w_count;
    s.out_size = widths[i];
    off += s.w_count + s.b_count;
    stages_.push_back(s);
    width = widths[i];
  }

  for (std::size_t i = 0; i < stages_.size(); ++i) stages_[i].relu = (i + 1 < stages_.size());

  params_.assign(off, 0.0);
  momentum_.assign(off, 0.0);
}

void Architecture::validate() const {
  ConvNet probe(*this);  // construction runs the full shape check
  (void)probe;
}

ConvNet::ConvNet(Architecture arch) : arch_(std::move(arch)) { build_plan(); }

ConvNet ConvNet::init(Architecture arch, Rng& rng) {
  ConvNet net(std::move(arch));
  for (const auto& s : net.stages_) {
    const double fan_in = s.is_conv ? double(s.in_ch) * s.kernel : double(s.in_width);
    const double fan_out = s.is_conv ? double(s.filters) * s.kernel : double(s.out_width);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < s.w_count; ++i)
      net.params_[s.w_off + i] = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return net;
}

void ConvNet::forward(const Matrix& input, Scratch& s, std::vector<double>& out) const {
  if (input.rows != arch_.input_slots || input.cols != arch_.features)
    throw std::invalid_argument("ConvNet::forward: input shape mismatch");
  if (!all_finite(input.data)) throw std::invalid_argument("ConvNet::forward: non-finite input");

  const std::size_t n = stages_.size();
  s.act.resize(n + 1);
  s.pre.resize(n);
  s.pool_argmax.resize(n);

  // Channel-major input buffer: act[0][c*len + t].
  auto& a0 = s.act[0];
  a0.resize(input.data.size());
  for (int c = 0; c < input.cols; ++c)
    for (int t = 0; t < input.rows; ++t) a0[static_cast<std::size_t>(c) * input.rows + t] = input(t, c);

  const double* P = params_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const StageInfo& st = stages_[i];
    const auto& x = s.act[i];
    auto& y = s.act[i + 1];
    auto& pre = s.pre[i];
    if (st.is_conv) {
      pre.resize(static_cast<std::size_t>(st.filters) * st.conv_len);
      const double* W = P + st.w_off;
      const double* B = P + st.b_off;
      for (int f = 0; f < st.filters; ++f) {
        double* prow = pre.data() + static_cast<std::size_t>(f) * st.conv_len;
        const double* wf = W + static_cast<std::size_t>(f) * st.in_ch * st.kernel;
        for (int t = 0; t < st.conv_len; ++t) {
          double acc = B[f];
          const int t0 = t * st.stride;
          for (int c = 0; c < st.in_ch; ++c) {
            const double* xi = x.data() + static_cast<std::size_t>(c) * st.in_len + t0;
            const double* wc = wf + static_cast<std::size_t>(c) * st.kernel;
            for (int k = 0; k < st.kernel; ++k) acc += wc[k] * xi[k];
          }
          prow[t] = acc;
        }
      }
      // relu (hidden stages), then non-overlapping max-pool
      y.resize(st.out_size);
      auto& arg = s.pool_argmax[i];
      arg.resize(st.out_size);
      for (int f = 0; f < st.filters; ++f) {
        const double* prow = pre.data() + static_cast<std::size_t>(f) * st.conv_len;
        for (int t = 0; t < st.out_len; ++t) {
          const int base = t * st.pool;
          int best = base;
          double bv = prow[base];
          for (int k = 1; k < st.pool; ++k)
            if (prow[base + k] > bv) {
              bv = prow[base + k];
              best = base + k;
            }
          if (st.relu && bv < 0.0) bv = 0.0;
          y[static_cast<std::size_t>(f) * st.out_len + t] = bv;
          arg[static_cast<std::size_t>(f) * st.out_len + t] = best;
        }
      }
    } else {
      pre.resize(st.out_width);
      const double* W = P + st.w_off;
      const double* B = P + st.b_off;
      for (int o = 0; o < st.out_width; ++o) {
        const double* wr = W + static_cast<std::size_t>(o) * st.in_width;
        double acc = B[o];
        for (int j = 0; j < st.in_width; ++j) acc += wr[j] * x[j];
        pre[o] = acc;
      }
      y.resize(st.out_width);
      if (st.relu)
        for (int o = 0; o < st.out_width; ++o) y[o] = pre[o] > 0.0 ? pre[o] : 0.0;
      else
        y.assign(pre.begin(), pre.end());
    }
  }
  out = s.act[n];
}

std::vector<double> ConvNet::forward(const Matrix& input) const {
  Scratch s;
  std::vector<double> out;
  forward(input, s, out);
  return out;
}

double ConvNet::backward(const Matrix& input, const Matrix& target, Scratch& s,
                         std::vector<double>& grad) const {
  if (target.rows != arch_.output_slots || target.cols != arch_.features)
    throw std::invalid_argument("ConvNet::backward: target shape mismatch");
  forward(input, s, s.out);

  const std::size_t n = stages_.size();
  const int out_size = arch_.output_size();
  // Dense regions are fully overwritten below; only conv regions accumulate
  // across time positions and need clearing.
  grad.resize(params_.size());
  for (const auto& st : stages_)
    if (st.is_conv) std::fill(grad.begin() + st.w_off, grad.begin() + st.b_off + st.b_count, 0.0);
  s.delta.resize(n + 1);

  // Output ordering is time-major: element y*features + f.
  auto& dlast = s.delta[n];
  dlast.resize(out_size);
  double loss = 0.0;
  for (int r = 0; r < target.rows; ++r)
    for (int c = 0; c < target.cols; ++c) {
      const int j = r * target.cols + c;
      const double diff = s.out[j] - target(r, c);
      loss += diff * diff;
      dlast[j] = 2.0 * diff / out_size;
    }
  loss /= out_size;

  double* G = grad.data();
  const double* P = params_.data();
  for (std::size_t i = n; i-- > 0;) {
    const StageInfo& st = stages_[i];
    const auto& x = s.act[i];
    const auto& pre = s.pre[i];
    auto& dout = s.delta[i + 1];
    auto& din = s.delta[i];
    din.assign(x.size(), 0.0);

    if (st.is_conv) {
      // Scatter pooled deltas back to conv positions, masking hidden relu.
      auto& dpre = s.out;  // reuse as temp buffer
      dpre.assign(pre.size(), 0.0);
      const auto& arg = s.pool_argmax[i];
      for (int f = 0; f < st.filters; ++f)
        for (int t = 0; t < st.out_len; ++t) {
          const std::size_t oi = static_cast<std::size_t>(f) * st.out_len + t;
          const int src = arg[oi];
          double d = dout[oi];
          if (st.relu && pre[static_cast<std::size_t>(f) * st.conv_len + src] <= 0.0) d = 0.0;
          dpre[static_cast<std::size_t>(f) * st.conv_len + src] += d;
        }
      double* GW = G + st.w_off;
      double* GB = G + st.b_off;
      const double* W = P + st.w_off;
      for (int f = 0; f < st.filters; ++f) {
        const double* drow = dpre.data() + static_cast<std::size_t>(f) * st.conv_len;
        double* gwf = GW + static_cast<std::size_t>(f) * st.in_ch * st.kernel;
        const double* wf = W + static_cast<std::size_t>(f) * st.in_ch * st.kernel;
        double gb = 0.0;
        for (int t = 0; t < st.conv_len; ++t) gb += drow[t];
        GB[f] += gb;
        for (int c = 0; c < st.in_ch; ++c) {
          const double* xc = x.data() + static_cast<std::size_t>(c) * st.in_len;
          double* dc = din.data() + static_cast<std::size_t>(c) * st.in_len;
          double* gwc = gwf + static_cast<std::size_t>(c) * st.kernel;
          const double* wc = wf + static_cast<std::size_t>(c) * st.kernel;
          for (int t = 0; t < st.conv_len; ++t) {
            const double d = drow[t];
            if (d == 0.0) continue;
            const int t0 = t * st.stride;
            for (int k = 0; k < st.kernel; ++k) {
              gwc[k] += d * xc[t0 + k];
              dc[t0 + k] += d * wc[k];
            }
          }
        }
      }
    } else {
      // dout is with respect to act; mask through relu for hidden stages.
      if (st.relu)
        for (int o = 0; o < st.out_width; ++o)
          if (pre[o] <= 0.0) dout[o] = 0.0;
      double* GW = G + st.w_off;
      double* GB = G + st.b_off;
      const double* W = P + st.w_off;
      for (int o = 0; o < st.out_width; ++o) {
        const double d = dout[o];
        GB[o] = d;
        double* gw = GW + static_cast<std::size_t>(o) * st.in_width;
        const double* wr = W + static_cast<std::size_t>(o) * st.in_width;
        if (d != 0.0) {
          for (int j = 0; j < st.in_width; ++j) {
            gw[j] = d * x[j];
            din[j] += d * wr[j];
          }
        } else {
          std::fill(gw, gw + st.in_width, 0.0);
        }
      }
    }
  }
  return loss;
}

bool ConvNet::apply_sgd(std::span<const double> grad, double lr, double momentum) {
  if (grad.size() != params_.size()) throw std::invalid_argument("apply_sgd: gradient size mismatch");
  if (lr < 0.0) throw std::invalid_argument("apply_sgd: lr must be non-negative");
  if (momentum < 0.0 || momentum >= 1.0)
    throw std::invalid_argument("apply_sgd: momentum must be in [0,1)");
  if (!all_finite(grad)) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    double v = momentum * momentum_[i] + grad[i];
    // Dead units decay v geometrically into denormal range, which stalls
    // the update loop on x86; anything this small is exactly as good as 0.
    if (v > -1e-300 && v < 1e-300) v = 0.0;
    momentum_[i] = v;
    params_[i] -= lr * v;
  }
  ++steps_;
  return true;
}

void ConvNet::restore(std::vector<double> params, std::vector<double> momentum,
                      std::uint64_t steps) {
  if (params.size() != params_.size() || momentum.size() != momentum_.size())
    throw std::invalid_argument("ConvNet::restore: parameter count mismatch");
  params_ = std::move(params);
  momentum_ = std::move(momentum);
  steps_ = steps;
}

double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty())
    throw std::invalid_argument("mse_loss: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  return acc / pred.size();
}

double mse_loss(const Matrix& pred, const Matrix& target) {
  if (!pred.same_shape(target)) throw std::invalid_argument("mse_loss: shape mismatch");
  return mse_loss(std::span<const double>(pred.data), std::span<const double>(target.data));
}

std::optional<Prediction> predict_user(const ConvNet& net, const NormStats& stats,
                                       const History& history, long made_at_slot, Scratch& s) {
  const int x_slots = net.arch().input_slots;
  auto window = history.input_window(x_slots);
  if (!window) return std::nullopt;

  const Matrix normalized = stats.normalize(*window);
  net.forward(normalized, s, s.out);

  const int y_slots = net.arch().output_slots;
  const int features = net.arch().features;
  Matrix shaped(y_slots, features);
  for (int r = 0; r < y_slots; ++r)
    for (int c = 0; c < features; ++c) shaped(r, c) = s.out[r * features + c];

  Prediction p;
  p.user_id = history.user_id();
  p.made_at_slot = made_at_slot;
  p.values = stats.denormalize(shaped);
  if (!all_finite(p.values.data))
    throw std::runtime_error("predict_user: non-finite forecast for user " +
                             std::to_string(history.user_id()));
  return p;
}

TrainOutcome online_train_step(ConvNet& net, const NormStats& stats,
                               std::span<const History* const> histories, double lr,
                               double momentum, Scratch& s) {
  TrainOutcome outcome;
  const int x_slots = net.arch().input_slots;
  const int y_slots = net.arch().output_slots;
  double loss_sum = 0.0;
  int last_id = -1;
  for (const History* h : histories) {
    if (h->user_id() <= last_id)
      throw std::logic_error("online_train_step: histories must be sorted by user_id");
    last_id = h->user_id();
    auto pair = h->training_pair(x_slots, y_slots);
    if (!pair) continue;
    const Matrix input = stats.normalize(pair->input);
    const Matrix target = stats.normalize(pair->target);
    const double loss = net.backward(input, target, s, s.grad);
    if (net.apply_sgd(s.grad, lr, momentum)) {
      loss_sum += loss;
      ++outcome.users_trained;
    } else {
      ++outcome.rejected_updates;
    }
  }
  if (outcome.users_trained > 0) outcome.mean_loss = loss_sum / outcome.users_trained;
  return outcome;
}

}  // namespace wigig
