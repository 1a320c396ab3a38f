#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mgp/dataset.hpp"
#include "mgp/model.hpp"

namespace mgp {

struct TrainConfig {
  double learning_rate = 0.005;
  int batch_size = 512;
  long iterations = 20000;
  std::uint64_t seed = 0;
  long snapshot_every = 100;  // last-good restore granularity
  ModelConfig model;
};

struct TraceRow {
  long iteration = 0;
  double elbo = 0.0;
  double wall_ms = 0.0;
};

struct TrainResult {
  std::vector<TraceRow> trace;
  double final_elbo = 0.0;
};

/// Adam on a fixed parameter list; beta1 0.9, beta2 0.999, eps 1e-8.
class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<Tensor> params, double learning_rate);
  void step(const std::vector<Matrix>& grads);
  const std::vector<Tensor>& params() const { return params_; }

 private:
  std::vector<Tensor> params_;
  std::vector<Matrix> m_, v_;
  double lr_;
  long t_ = 0;
};

/// Maximizes the model ELBO with minibatch Adam: epoch shuffling without
/// replacement, loss trace every iteration. A non-finite loss restores the
/// last snapshot and raises NonFiniteLoss.
TrainResult adam_train(
    Model& model, const Dataset& data, const TrainConfig& cfg,
    const std::function<void(long, double)>& callback = nullptr);

}  // namespace mgp
