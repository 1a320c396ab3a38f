#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mgp/shgp.hpp"
#include "mgp/slgp.hpp"
#include "mgp/smgp.hpp"
#include "mgp/svgp.hpp"

namespace mgp {

struct NamedParam {
  std::string name;
  Tensor tensor;
};

/// Construction-time settings of one model instance.
struct ModelConfig {
  std::string kind = "svgp";  // svgp | shgp | smgp | slgp
  int num_inducing = 100;
  int n_experts = 4;          // smgp
  double temperature = 0.01;  // smgp
  int s_mc = 10;              // smgp
  double beta = 1.0;          // slgp
  int s_iw = 10;              // slgp
  int d_w = 1;                // slgp
  int d_h = 0;                // slgp; 0 means d_x + d_w
  int gh_points = 20;         // shgp prediction
  std::vector<int> hidden = {100, 100, 100};
  double noise_init = 1.0;
  double c_init = 1.0;
  double nu0_init = 0.01;
  std::string slgp_bound = "hybrid";  // hybrid | iwvi | vi
};

struct SampleSet {
  Matrix y_samples;                 // n x samples_per_point
  std::optional<Matrix> f_samples;  // latent-path samples when available
};

/// Shared surface of the four trainable models.
class Model {
 public:
  virtual ~Model() = default;
  virtual const std::string& kind() const = 0;
  virtual std::vector<NamedParam> parameters() const = 0;
  virtual Tensor elbo(const Matrix& x, const Vector& y, long n_total,
                      RngState& rng) const = 0;
  virtual SampleSet predict(const Matrix& x_star, int samples_per_point,
                            RngState& rng) const = 0;
  virtual const ModelConfig& config() const = 0;
  virtual int input_dim() const = 0;
};

class SvgpAdapter;
class ShgpAdapter;
class SmgpAdapter;
class SlgpAdapter;

/// Builds an untrained model with the given inducing inputs (already in the
/// space the GP lives on: d_x, or d_h for slgp).
std::unique_ptr<Model> build_model(const ModelConfig& cfg, int d_x,
                                   const Matrix& inducing_inputs,
                                   RngState& rng);

/// Builds with the standard initialization: k-means centroids on x for the
/// first d_x inducing coordinates, standard-normal draws for extra
/// dimensions (slgp).
std::unique_ptr<Model> build_model_for_data(const ModelConfig& cfg,
                                            const Matrix& x, RngState& rng);

class SvgpAdapter : public Model {
 public:
  SvgpModel model;
  SvgpAdapter(SvgpModel m, ModelConfig cfg) : model(std::move(m)), cfg_(std::move(cfg)) {}
  const std::string& kind() const override;
  std::vector<NamedParam> parameters() const override;
  Tensor elbo(const Matrix& x, const Vector& y, long n_total,
              RngState& rng) const override;
  SampleSet predict(const Matrix& x_star, int spp, RngState& rng) const override;
  const ModelConfig& config() const override { return cfg_; }
  int input_dim() const override { return model.block.input_dim(); }

 private:
  ModelConfig cfg_;
};

class ShgpAdapter : public Model {
 public:
  ShgpModel model;
  ShgpAdapter(ShgpModel m, ModelConfig cfg) : model(std::move(m)), cfg_(std::move(cfg)) {}
  const std::string& kind() const override;
  std::vector<NamedParam> parameters() const override;
  Tensor elbo(const Matrix& x, const Vector& y, long n_total,
              RngState& rng) const override;
  SampleSet predict(const Matrix& x_star, int spp, RngState& rng) const override;
  const ModelConfig& config() const override { return cfg_; }
  int input_dim() const override { return model.f_block.input_dim(); }

 private:
  ModelConfig cfg_;
};

class SmgpAdapter : public Model {
 public:
  SmgpModel model;
  SmgpAdapter(SmgpModel m, ModelConfig cfg) : model(std::move(m)), cfg_(std::move(cfg)) {}
  const std::string& kind() const override;
  std::vector<NamedParam> parameters() const override;
  Tensor elbo(const Matrix& x, const Vector& y, long n_total,
              RngState& rng) const override;
  SampleSet predict(const Matrix& x_star, int spp, RngState& rng) const override;
  const ModelConfig& config() const override { return cfg_; }
  int input_dim() const override { return model.expert_blocks[0].input_dim(); }

 private:
  ModelConfig cfg_;
};

class SlgpAdapter : public Model {
 public:
  SlgpModel model;
  SlgpAdapter(SlgpModel m, ModelConfig cfg) : model(std::move(m)), cfg_(std::move(cfg)) {}
  const std::string& kind() const override;
  std::vector<NamedParam> parameters() const override;
  Tensor elbo(const Matrix& x, const Vector& y, long n_total,
              RngState& rng) const override;
  SampleSet predict(const Matrix& x_star, int spp, RngState& rng) const override;
  const ModelConfig& config() const override { return cfg_; }
  int input_dim() const override { return model.d_x; }
  SlgpModel::Bound bound() const;

 private:
  ModelConfig cfg_;
};

}  // namespace mgp
