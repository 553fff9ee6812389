#ifndef WIGIG_RNG_HPP
#define WIGIG_RNG_HPP

#include <cstdint>
#include <random>

namespace wigig {

// splitmix64; used to expand one seed into decorrelated stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded random source. One instance per stream; streams derived from the
/// same master seed are independent and reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  /// Independent stream `stream_id` of master seed `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(splitmix64(seed) ^ splitmix64(stream_id * 0x9e3779b97f4a7c15ULL + 1));
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  /// Inclusive on both ends.
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }

  double normal(double mean, double sigma) {
    if (sigma <= 0.0) return mean;
    return std::normal_distribution<double>(mean, sigma)(gen_);
  }

  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

  std::uint64_t next_u64() { return gen_(); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace wigig

#endif  // WIGIG_RNG_HPP
