#include "mgp/model.hpp"

#include "mgp/dataset.hpp"

namespace mgp {

namespace {
const std::string kSvgp = "svgp";
const std::string kShgp = "shgp";
const std::string kSmgp = "smgp";
const std::string kSlgp = "slgp";

void push_block_params(std::vector<NamedParam>& out, const std::string& prefix,
                       const InducingBlock& b) {
  out.push_back({prefix + ".z", b.z});
  out.push_back({prefix + ".m", b.m});
  out.push_back({prefix + ".s_raw", b.s_raw});
  out.push_back({prefix + ".kernel.log_lengthscales", b.kernel.log_lengthscales});
  out.push_back({prefix + ".kernel.log_signal_variance", b.kernel.log_signal_variance});
  if (b.learn_prior_mean) out.push_back({prefix + ".prior_mean", b.prior_mean});
}

void push_net_params(std::vector<NamedParam>& out, const std::string& prefix,
                     const MlpFunction& net) {
  for (size_t l = 0; l < net.weights.size(); ++l) {
    out.push_back({prefix + ".w" + std::to_string(l), net.weights[l]});
    out.push_back({prefix + ".b" + std::to_string(l), net.biases[l]});
  }
  out.push_back({prefix + ".w_mean", net.w_mean});
  out.push_back({prefix + ".b_mean", net.b_mean});
  out.push_back({prefix + ".w_var", net.w_var});
  out.push_back({prefix + ".b_var", net.b_var});
}
}  // namespace

// --- svgp ---

const std::string& SvgpAdapter::kind() const { return kSvgp; }

std::vector<NamedParam> SvgpAdapter::parameters() const {
  std::vector<NamedParam> out;
  push_block_params(out, "f", model.block);
  out.push_back({"noise.log_variance", model.noise.log_variance});
  return out;
}

Tensor SvgpAdapter::elbo(const Matrix& x, const Vector& y, long n_total,
                         RngState&) const {
  return model.elbo(x, y, n_total);
}

SampleSet SvgpAdapter::predict(const Matrix& x_star, int spp,
                               RngState& rng) const {
  return SampleSet{model.predict_samples(x_star, spp, rng), std::nullopt};
}

// --- shgp ---

const std::string& ShgpAdapter::kind() const { return kShgp; }

std::vector<NamedParam> ShgpAdapter::parameters() const {
  std::vector<NamedParam> out;
  push_block_params(out, "f", model.f_block);
  push_block_params(out, "w", model.w_block);
  out.push_back({"log_c", model.log_c});
  return out;
}

Tensor ShgpAdapter::elbo(const Matrix& x, const Vector& y, long n_total,
                         RngState&) const {
  return model.elbo(x, y, n_total);
}

SampleSet ShgpAdapter::predict(const Matrix& x_star, int spp,
                               RngState& rng) const {
  auto pred = model.predict(x_star, cfg_.gh_points, spp, rng);
  return SampleSet{std::move(pred.y_samples), std::nullopt};
}

// --- smgp ---

const std::string& SmgpAdapter::kind() const { return kSmgp; }

std::vector<NamedParam> SmgpAdapter::parameters() const {
  std::vector<NamedParam> out;
  for (int t = 0; t < model.n_experts(); ++t) {
    push_block_params(out, "expert" + std::to_string(t), model.expert_blocks[t]);
    push_block_params(out, "assign" + std::to_string(t), model.assign_blocks[t]);
    out.push_back({"noise" + std::to_string(t), model.log_noise[t]});
  }
  return out;
}

Tensor SmgpAdapter::elbo(const Matrix& x, const Vector& y, long n_total,
                         RngState& rng) const {
  return model.elbo(x, y, n_total, rng);
}

SampleSet SmgpAdapter::predict(const Matrix& x_star, int spp,
                               RngState& rng) const {
  return SampleSet{model.predict_samples(x_star, spp, rng), std::nullopt};
}

// --- slgp ---

const std::string& SlgpAdapter::kind() const { return kSlgp; }

SlgpModel::Bound SlgpAdapter::bound() const {
  if (cfg_.slgp_bound == "hybrid") return SlgpModel::Bound::kHybrid;
  if (cfg_.slgp_bound == "iwvi") return SlgpModel::Bound::kIwvi;
  if (cfg_.slgp_bound == "vi") return SlgpModel::Bound::kVi;
  throw Error("slgp: unknown bound '" + cfg_.slgp_bound + "'");
}

std::vector<NamedParam> SlgpAdapter::parameters() const {
  std::vector<NamedParam> out;
  push_block_params(out, "gp", model.gp_block);
  out.push_back({"noise.log_variance", model.noise.log_variance});
  out.push_back({"log_nu0", model.log_nu0});
  push_net_params(out, "prior_net", model.prior_net);
  push_net_params(out, "post_net", model.post_net);
  push_net_params(out, "enc_net", model.enc_net);
  return out;
}

Tensor SlgpAdapter::elbo(const Matrix& x, const Vector& y, long n_total,
                         RngState& rng) const {
  return model.elbo(bound(), x, y, n_total, rng);
}

SampleSet SlgpAdapter::predict(const Matrix& x_star, int spp,
                               RngState& rng) const {
  auto pred = model.predict(x_star, spp, rng);
  return SampleSet{std::move(pred.y_samples), std::move(pred.f_samples)};
}

// --- factory ---

std::unique_ptr<Model> build_model(const ModelConfig& cfg, int d_x,
                                   const Matrix& inducing_inputs,
                                   RngState& rng) {
  if (cfg.kind == kSvgp) {
    SvgpModel m = SvgpModel::create(SeArdKernel::create(d_x), inducing_inputs,
                                    cfg.noise_init);
    return std::make_unique<SvgpAdapter>(std::move(m), cfg);
  }
  if (cfg.kind == kShgp) {
    ShgpModel m =
        ShgpModel::create(SeArdKernel::create(d_x), SeArdKernel::create(d_x),
                          inducing_inputs, cfg.c_init);
    return std::make_unique<ShgpAdapter>(std::move(m), cfg);
  }
  if (cfg.kind == kSmgp) {
    SmgpModel m = SmgpModel::create(cfg.n_experts, d_x, inducing_inputs, 1.0,
                                    1.0, cfg.noise_init);
    m.temperature = cfg.temperature;
    m.mc_samples = cfg.s_mc;
    return std::make_unique<SmgpAdapter>(std::move(m), cfg);
  }
  if (cfg.kind == kSlgp) {
    int d_h = cfg.d_h > 0 ? cfg.d_h : d_x + cfg.d_w;
    SlgpModel m =
        SlgpModel::create(d_x, cfg.d_w, d_h, inducing_inputs, cfg.hidden,
                          cfg.beta, cfg.s_iw, rng, cfg.noise_init, cfg.nu0_init);
    return std::make_unique<SlgpAdapter>(std::move(m), cfg);
  }
  throw Error("build_model: unknown kind '" + cfg.kind + "'");
}

std::unique_ptr<Model> build_model_for_data(const ModelConfig& cfg,
                                            const Matrix& x, RngState& rng) {
  const int d_x = static_cast<int>(x.cols());
  const int m = cfg.num_inducing;
  Matrix z = kmeans_init(x, m, rng.seed());
  if (cfg.kind == kSlgp) {
    int d_h = cfg.d_h > 0 ? cfg.d_h : d_x + cfg.d_w;
    Matrix z_aug(m, d_h);
    z_aug.leftCols(d_x) = z;
    z_aug.rightCols(d_h - d_x) = rng.std_normal_matrix(m, d_h - d_x);
    return build_model(cfg, d_x, z_aug, rng);
  }
  return build_model(cfg, d_x, z, rng);
}

}  // namespace mgp
