#include "mgp/rng.hpp"

namespace mgp {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

RngState RngState::derive(std::uint64_t seed, std::uint64_t stream) {
  return RngState(splitmix64(splitmix64(seed) ^ splitmix64(~stream)));
}

Matrix RngState::std_normal_matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal();
  return m;
}

Matrix RngState::gumbel_matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = gumbel();
  return m;
}

Matrix RngState::uniform_matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = uniform();
  return m;
}

int RngState::categorical(const Vector& weights) {
  double total = weights.sum();
  double u = uniform() * total;
  double acc = 0.0;
  for (Index i = 0; i < weights.size(); ++i) {
    acc += weights(i);
    if (u <= acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size() - 1);
}

std::vector<int> RngState::permutation(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(uniform() * (i + 1));
    if (j > i) j = i;
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

Tensor sample_std_normal(RngState& rng, Index rows, Index cols) {
  return Tensor::constant(rng.std_normal_matrix(rows, cols));
}

Tensor sample_gumbel(RngState& rng, Index rows, Index cols) {
  return Tensor::constant(rng.gumbel_matrix(rows, cols));
}

}  // namespace mgp
