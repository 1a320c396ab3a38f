#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mgp/tensor.hpp"

namespace mgp {

/// Seeded random stream. Identical seed and call sequence reproduce
/// identical draws bit-for-bit; all transforms (Box-Muller, Gumbel,
/// categorical) are built on one uniform source, nothing
/// implementation-defined.
class RngState {
 public:
  explicit RngState(std::uint64_t seed) : eng_(seed), seed_(seed) {}

  // Independent stream for (seed, stream-index) pairs, e.g. benchmark splits.
  static RngState derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return pos_; }

  /// Uniform draw in the open interval (0, 1).
  double uniform() {
    ++pos_;
    return (static_cast<double>(eng_() >> 11) + 0.5) * k2m53;
  }

  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  double gumbel() { return -std::log(-std::log(uniform())); }

  Matrix std_normal_matrix(Index rows, Index cols);
  Matrix gumbel_matrix(Index rows, Index cols);
  Matrix uniform_matrix(Index rows, Index cols);

  /// Index draw from unnormalized non-negative weights.
  int categorical(const Vector& weights);

  /// Fisher-Yates shuffle of 0..n-1.
  std::vector<int> permutation(int n);

 private:
  static constexpr double k2m53 = 1.0 / 9007199254740992.0;
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 eng_;
  std::uint64_t seed_ = 0;
  std::uint64_t pos_ = 0;
};

/// i.i.d. N(0,1) draws as a constant tensor.
Tensor sample_std_normal(RngState& rng, Index rows, Index cols);

/// i.i.d. standard Gumbel draws -log(-log(u)) as a constant tensor.
Tensor sample_gumbel(RngState& rng, Index rows, Index cols);

}  // namespace mgp
