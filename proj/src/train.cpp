#include "mgp/train.hpp"

#include <chrono>
#include <cmath>

namespace mgp {

AdamOptimizer::AdamOptimizer(std::vector<Tensor> params, double learning_rate)
    : params_(std::move(params)), lr_(learning_rate) {
  if (lr_ <= 0.0) throw Error("AdamOptimizer: learning rate must be > 0");
  for (const auto& p : params_) {
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void AdamOptimizer::step(const std::vector<Matrix>& grads) {
  if (grads.size() != params_.size()) throw Error("AdamOptimizer: grad count");
  ++t_;
  const double c1 = 1.0 - std::pow(0.9, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(0.999, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    m_[i] = 0.9 * m_[i] + 0.1 * grads[i];
    v_[i] = (0.999 * v_[i].array() + 0.001 * grads[i].array().square()).matrix();
    params_[i].leaf_value().array() -=
        lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + 1e-8);
  }
}

TrainResult adam_train(Model& model, const Dataset& data,
                       const TrainConfig& cfg,
                       const std::function<void(long, double)>& callback) {
  const long n = data.n();
  if (n < 1) throw Error("adam_train: empty dataset");
  const long batch = std::min<long>(cfg.batch_size, n);
  if (batch < 1) throw Error("adam_train: batch size must be >= 1");

  std::vector<Tensor> params;
  std::vector<std::string> names;
  for (auto& np : model.parameters()) {
    params.push_back(np.tensor);
    names.push_back(np.name);
  }
  AdamOptimizer opt(params, cfg.learning_rate);
  RngState rng(cfg.seed);

  std::vector<Matrix> snapshot;
  auto take_snapshot = [&] {
    snapshot.clear();
    for (auto& p : params) snapshot.push_back(p.value());
  };
  take_snapshot();
  long snapshot_iter = 0;

  std::vector<int> order;
  size_t cursor = 0;
  auto next_batch = [&](Matrix* xb, Vector* yb) {
    if (cursor >= order.size()) {
      order = rng.permutation(static_cast<int>(n));
      cursor = 0;
    }
    const long take = std::min<long>(batch, static_cast<long>(order.size() - cursor));
    xb->resize(take, data.dim());
    yb->resize(take);
    for (long i = 0; i < take; ++i) {
      xb->row(i) = data.x.row(order[cursor + i]);
      (*yb)(i) = data.y(order[cursor + i]);
    }
    cursor += take;
  };

  TrainResult out;
  out.trace.reserve(cfg.iterations);
  Matrix xb;
  Vector yb;
  using clock = std::chrono::steady_clock;
  for (long it = 1; it <= cfg.iterations; ++it) {
    auto t0 = clock::now();
    double elbo_value;
    try {
      next_batch(&xb, &yb);
      Tensor elbo = model.elbo(xb, yb, n, rng);
      elbo_value = elbo.scalar();
      if (!std::isfinite(elbo_value)) throw NonFiniteValue("loss");
      std::vector<Matrix> grads = grad(neg(elbo), params, /*allow_unused=*/true);
      opt.step(grads);
    } catch (const NonFiniteValue&) {
      for (size_t i = 0; i < params.size(); ++i) {
        params[i].leaf_value() = snapshot[i];
      }
      throw NonFiniteLoss("adam_train: non-finite loss at iteration " +
                              std::to_string(it) +
                              "; parameters restored to iteration " +
                              std::to_string(snapshot_iter),
                          snapshot_iter);
    }
    double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    out.trace.push_back({it, elbo_value, ms});
    out.final_elbo = elbo_value;
    if (callback) callback(it, elbo_value);
    if (it % cfg.snapshot_every == 0) {
      take_snapshot();
      snapshot_iter = it;
    }
  }
  return out;
}

}  // namespace mgp
