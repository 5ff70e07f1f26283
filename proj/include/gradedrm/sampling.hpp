#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "gradedrm/graded.hpp"

namespace gradedrm {

/// Seed for one named check, mixed from the run seed so that adding or
/// reordering checks never shifts the draws of another.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

/// Deterministic source of spectral parameters.
class Sampler {
 public:
  static constexpr double kPoleMargin = 1e-3;
  static constexpr int kMaxAttempts = 100;

  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  /// Uniform in [0, 1) from the top 53 bits of one engine word.
  double uniform();
  /// x + iy with x in (0, 1), y in (0.1, 0.5).
  cplx spectral();

  /// Draws `count` spectral parameters, redrawing the whole tuple while any
  /// value returned by `critical` lies within kPoleMargin of an integer.
  /// Throws std::runtime_error after kMaxAttempts tuples.
  std::vector<cplx> draw(int count,
                         const std::function<std::vector<cplx>(std::span<const cplx>)>& critical);

  /// Number of rejected tuples so far.
  int resamples() const { return resamples_; }

 private:
  std::mt19937_64 rng_;
  int resamples_ = 0;
};

}  // namespace gradedrm
