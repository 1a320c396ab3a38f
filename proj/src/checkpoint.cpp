#include "mgp/checkpoint.hpp"

#include <fstream>
#include <map>

#include <json.hpp>

namespace mgp {

using nlohmann::json;

namespace {

json model_config_to_json(const ModelConfig& m) {
  return json{{"kind", m.kind},
              {"num_inducing", m.num_inducing},
              {"n_experts", m.n_experts},
              {"temperature", m.temperature},
              {"s_mc", m.s_mc},
              {"beta", m.beta},
              {"s_iw", m.s_iw},
              {"d_w", m.d_w},
              {"d_h", m.d_h},
              {"gh_points", m.gh_points},
              {"hidden", m.hidden},
              {"noise_init", m.noise_init},
              {"c_init", m.c_init},
              {"nu0_init", m.nu0_init},
              {"slgp_bound", m.slgp_bound}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig m;
  m.kind = j.at("kind").get<std::string>();
  m.num_inducing = j.at("num_inducing").get<int>();
  m.n_experts = j.at("n_experts").get<int>();
  m.temperature = j.at("temperature").get<double>();
  m.s_mc = j.at("s_mc").get<int>();
  m.beta = j.at("beta").get<double>();
  m.s_iw = j.at("s_iw").get<int>();
  m.d_w = j.at("d_w").get<int>();
  m.d_h = j.at("d_h").get<int>();
  m.gh_points = j.at("gh_points").get<int>();
  m.hidden = j.at("hidden").get<std::vector<int>>();
  m.noise_init = j.at("noise_init").get<double>();
  m.c_init = j.at("c_init").get<double>();
  m.nu0_init = j.at("nu0_init").get<double>();
  m.slgp_bound = j.at("slgp_bound").get<std::string>();
  return m;
}

json train_config_json(const TrainConfig& cfg) {
  return json{{"learning_rate", cfg.learning_rate},
              {"batch_size", cfg.batch_size},
              {"iterations", cfg.iterations},
              {"seed", cfg.seed},
              {"snapshot_every", cfg.snapshot_every},
              {"model", model_config_to_json(cfg.model)}};
}

TrainConfig train_config_parse(const json& j) {
  TrainConfig cfg;
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.iterations = j.at("iterations").get<long>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.snapshot_every = j.at("snapshot_every").get<long>();
  cfg.model = model_config_from_json(j.at("model"));
  return cfg;
}

json matrix_to_json(const Matrix& m) {
  std::vector<double> values(m.size());
  Index k = 0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) values[k++] = m(i, j);
  return json{{"shape", {m.rows(), m.cols()}}, {"values", values}};
}

Matrix matrix_from_json(const json& j) {
  auto shape = j.at("shape").get<std::vector<long>>();
  auto values = j.at("values").get<std::vector<double>>();
  if (shape.size() != 2 ||
      static_cast<long>(values.size()) != shape[0] * shape[1]) {
    throw ParseError("checkpoint: corrupt parameter block");
  }
  Matrix m(shape[0], shape[1]);
  Index k = 0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j2 = 0; j2 < m.cols(); ++j2) m(i, j2) = values[k++];
  return m;
}

}  // namespace

std::string train_config_to_json(const TrainConfig& cfg) {
  return train_config_json(cfg).dump(2);
}

TrainConfig train_config_from_json(const std::string& text) {
  return train_config_parse(json::parse(text));
}

std::string config_hash(const std::string& canonical_json) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical_json) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void save_checkpoint(const std::string& path, const Model& model,
                     const TrainConfig& cfg,
                     const std::optional<Standardizer>& standardizer) {
  json doc;
  doc["format_version"] = kCheckpointFormatVersion;
  doc["kind"] = model.kind();
  doc["input_dim"] = model.input_dim();
  doc["config"] = train_config_json(cfg);
  if (standardizer) {
    json s;
    s["x_mean"] = std::vector<double>(standardizer->x_mean.data(),
                                      standardizer->x_mean.data() +
                                          standardizer->x_mean.size());
    s["x_std"] = std::vector<double>(standardizer->x_std.data(),
                                     standardizer->x_std.data() +
                                         standardizer->x_std.size());
    s["y_mean"] = standardizer->y_mean;
    s["y_std"] = standardizer->y_std;
    doc["standardizer"] = s;
  }
  json params = json::array();
  for (const auto& np : model.parameters()) {
    json p = matrix_to_json(np.tensor.value());
    p["name"] = np.name;
    params.push_back(p);
  }
  doc["params"] = params;

  std::ofstream out(path);
  if (!out) throw IoError("save_checkpoint: cannot open '" + path + "'");
  out << doc.dump(1) << "\n";
  if (!out) throw IoError("save_checkpoint: write failed");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_checkpoint: cannot open '" + path + "'");
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/true);
  if (doc.at("format_version").get<int>() != kCheckpointFormatVersion) {
    throw ParseError("load_checkpoint: unsupported format version");
  }
  LoadedCheckpoint out;
  out.config = train_config_parse(doc.at("config"));
  if (doc.contains("standardizer")) {
    Standardizer s;
    auto xm = doc["standardizer"].at("x_mean").get<std::vector<double>>();
    auto xs = doc["standardizer"].at("x_std").get<std::vector<double>>();
    s.x_mean = Eigen::Map<Vector>(xm.data(), xm.size());
    s.x_std = Eigen::Map<Vector>(xs.data(), xs.size());
    s.y_mean = doc["standardizer"].at("y_mean").get<double>();
    s.y_std = doc["standardizer"].at("y_std").get<double>();
    out.standardizer = s;
  }

  const int d_x = doc.at("input_dim").get<int>();
  const ModelConfig& mc = out.config.model;
  // Placeholder inducing inputs; every parameter is overwritten below.
  int d_gp = d_x;
  if (mc.kind == "slgp") d_gp = mc.d_h > 0 ? mc.d_h : d_x + mc.d_w;
  Matrix z0 = Matrix::Zero(mc.num_inducing, d_gp);
  for (Index i = 0; i < z0.rows(); ++i) z0(i, 0) = static_cast<double>(i);
  RngState rng(out.config.seed);
  out.model = build_model(mc, d_x, z0, rng);

  std::map<std::string, Matrix> stored;
  for (const auto& p : doc.at("params")) {
    stored[p.at("name").get<std::string>()] = matrix_from_json(p);
  }
  for (auto& np : out.model->parameters()) {
    auto it = stored.find(np.name);
    if (it == stored.end()) {
      throw ParseError("load_checkpoint: missing parameter '" + np.name + "'");
    }
    if (it->second.rows() != np.tensor.rows() ||
        it->second.cols() != np.tensor.cols()) {
      throw ParseError("load_checkpoint: shape mismatch for '" + np.name + "'");
    }
    np.tensor.leaf_value() = it->second;
  }
  return out;
}

}  // namespace mgp
