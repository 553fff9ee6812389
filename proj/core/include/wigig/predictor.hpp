#ifndef WIGIG_PREDICTOR_HPP
#define WIGIG_PREDICTOR_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wigig/matrix.hpp"
#include "wigig/rng.hpp"
#include "wigig/telemetry.hpp"

namespace wigig {

/// One temporal convolution stage: `filters` taps of length `kernel` slid
/// along time with `stride`, followed by non-overlapping max-pooling of
/// window `pool` (1 = no pooling). Valid (no padding) everywhere.
struct ConvLayerSpec {
  int filters = 1;
  int kernel = 1;
  int stride = 1;
  int pool = 1;
};

/// Forecaster shape: conv stages over the input window, then dense hidden
/// layers, then a linear head of output_slots*features values. Hidden
/// activations are rectified; the head is linear. An empty dense list is
/// allowed when the flattened conv output already has the head's size.
struct Architecture {
  int input_slots = 25;
  int features = 6;
  int output_slots = 10;
  std::vector<ConvLayerSpec> conv;
  std::vector<int> dense;  // hidden widths; the output layer is implicit

  int output_size() const { return output_slots * features; }
  void validate() const;  // throws std::invalid_argument with context

  static Architecture defaults(int input_slots, int features, int output_slots);
};

/// Scratch buffers reused across forward/backward calls so the per-slot
/// training loop does not allocate.
struct Scratch {
  std::vector<std::vector<double>> act;       // post-activation per stage
  std::vector<std::vector<double>> pre;       // pre-activation per stage
  std::vector<std::vector<int>> pool_argmax;  // per conv stage
  std::vector<std::vector<double>> delta;
  std::vector<double> out;
  std::vector<double> grad;
};

/// The convolutional forecaster: all weights in one flat parameter vector,
/// with matching momentum buffers. All math in 64-bit floats; evaluation
/// order is fixed, so results are bit-reproducible for a given seed.
class ConvNet {
 public:
  explicit ConvNet(Architecture arch);

  /// Glorot-uniform weights, zero biases, zero momentum.
  static ConvNet init(Architecture arch, Rng& rng);

  const Architecture& arch() const { return arch_; }
  std::size_t param_count() const { return params_.size(); }
  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }
  std::span<const double> momentum() const { return momentum_; }
  std::uint64_t steps() const { return steps_; }

  /// input is an input_slots x features matrix in normalized units; output
  /// has output_slots*features entries. Throws on shape mismatch or
  /// non-finite input.
  void forward(const Matrix& input, Scratch& s, std::vector<double>& out) const;
  std::vector<double> forward(const Matrix& input) const;

  /// Gradient of the mean-squared-error loss w.r.t. every parameter.
  /// Returns the loss. Max-pool routes gradient to the argmax (first index
  /// on ties).
  double backward(const Matrix& input, const Matrix& target, Scratch& s,
                  std::vector<double>& grad) const;

  /// v <- momentum*v + g; theta <- theta - lr*v. Returns false and leaves
  /// the model untouched if the gradient is non-finite.
  bool apply_sgd(std::span<const double> grad, double lr, double momentum);

  // Checkpoint support.
  void restore(std::vector<double> params, std::vector<double> momentum, std::uint64_t steps);

 public:
  // Shape bookkeeping per stage, exposed for tests and checkpoint validation.
  struct StageInfo {
    bool is_conv = false;
    int in_len = 0, in_ch = 0;
    int filters = 0, kernel = 0, stride = 0, pool = 0;
    int conv_len = 0;   // after convolution
    int out_len = 0;    // after pooling
    int out_ch = 0;
    int in_width = 0;   // dense
    int out_width = 0;
    std::size_t w_off = 0, b_off = 0;
    std::size_t w_count = 0, b_count = 0;
    bool relu = false;
    int out_size = 0;  // flattened activation size
  };
  const std::vector<StageInfo>& stage_info() const { return stages_; }

 private:
  Architecture arch_;
  std::vector<StageInfo> stages_;
  std::vector<double> params_;
  std::vector<double> momentum_;
  std::uint64_t steps_ = 0;

  void build_plan();
};

double mse_loss(std::span<const double> pred, std::span<const double> target);
double mse_loss(const Matrix& pred, const Matrix& target);

/// A denormalized output_slots x features forecast for one user, covering
/// slots made_at_slot .. made_at_slot+output_slots-1.
struct Prediction {
  int user_id = -1;
  long made_at_slot = 0;
  Matrix values;
};

/// Normalize the newest input window, run the net, denormalize. nullopt if
/// the history is shorter than input_slots. Throws std::runtime_error if the
/// net emits non-finite values.
std::optional<Prediction> predict_user(const ConvNet& net, const NormStats& stats,
                                       const History& history, long made_at_slot, Scratch& s);

struct TrainOutcome {
  int users_trained = 0;
  int rejected_updates = 0;
  std::optional<double> mean_loss;
};

/// One backward+update per user with a complete training pair, in ascending
/// user_id order (histories must be passed sorted).
TrainOutcome online_train_step(ConvNet& net, const NormStats& stats,
                               std::span<const History* const> histories, double lr,
                               double momentum, Scratch& s);

}  // namespace wigig

#endif  // WIGIG_PREDICTOR_HPP
