#ifndef WIGIG_CHECKPOINT_HPP
#define WIGIG_CHECKPOINT_HPP

#include <string>

#include "wigig/predictor.hpp"
#include "wigig/telemetry.hpp"

namespace wigig {

/// What persists between runs: the trained net plus the normalization
/// statistics it was trained under. Restoring both reproduces behavior
/// bit-for-bit.
struct ModelState {
  ConvNet net;
  NormStats stats;
};

/// Versioned binary checkpoint (architecture, parameters, momentum, step
/// counter, normalization accumulators). Native-endian doubles.
void save_checkpoint(const ModelState& state, const std::string& path);
ModelState load_checkpoint(const std::string& path);

/// One-paragraph human-readable summary for `inspect-model`.
std::string checkpoint_summary(const ModelState& state);

}  // namespace wigig

#endif  // WIGIG_CHECKPOINT_HPP
