#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgp/dataset.hpp"

namespace mgp {

/// Per-test-point predictive samples in a common currency for evaluation.
struct PredictiveSampleSet {
  Matrix y_samples;                 // n x s
  std::optional<Matrix> f_samples;  // latent-path samples when the model has them
  std::string model_kind;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct KdeNllResult {
  Vector per_point;
  double mean = 0.0;
  bool bandwidth_fallback = false;  // some point hit the degenerate-sample path
};

/// Gaussian KDE negative log likelihood with the Silverman rule-of-thumb
/// bandwidth  h = 0.9 min(sd, IQR/1.34) s^{-1/5}  per test point. Degenerate
/// sample sets fall back to h = 1e-3 (1 + |mean|) and set the flag.
KdeNllResult kde_nll(const Matrix& y_samples, const Vector& y_true);

struct RunSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample std; 0 for a single run
};
RunSummary run_summary(const std::vector<double>& per_run_nll);

/// Optional named traces (e.g. a learned band) written next to the sample
/// files; one CSV column per entry plus the shared x column.
struct PlotTrace {
  std::string name;
  Vector values;
};

/// Writes samples_y.csv (x..., sample) with one row per (point, sample)
/// pair, samples_f.csv when latent samples exist, traces.csv for named
/// per-point curves, and a columns.txt sidecar describing every file.
void emit_plotdata(const PredictiveSampleSet& samples, const Matrix& x_star,
                   const std::string& out_dir,
                   const std::vector<PlotTrace>& traces = {});

}  // namespace mgp
