#include "mgp/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "mgp/errors.hpp"

namespace mgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

double quantile_sorted(const std::vector<double>& sorted, double q) {
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<size_t>(pos);
  size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}
}  // namespace

KdeNllResult kde_nll(const Matrix& y_samples, const Vector& y_true) {
  const Index n = y_samples.rows();
  const Index s = y_samples.cols();
  if (y_true.size() != n) throw DimensionMismatch("kde_nll: point count");
  if (s < 2) throw Error("kde_nll: need at least 2 samples per point");

  KdeNllResult out;
  out.per_point.resize(n);
  std::vector<double> sorted(s);
  for (Index i = 0; i < n; ++i) {
    double mean = y_samples.row(i).mean();
    double sd = std::sqrt((y_samples.row(i).array() - mean).square().sum() /
                          static_cast<double>(s - 1));
    for (Index j = 0; j < s; ++j) sorted[j] = y_samples(i, j);
    std::sort(sorted.begin(), sorted.end());
    double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double h = 0.9 * std::min(sd, iqr / 1.34) *
               std::pow(static_cast<double>(s), -0.2);
    if (!(h > 0.0)) {
      h = 1e-3 * (1.0 + std::abs(mean));
      out.bandwidth_fallback = true;
    }
    // -log( (1/s) sum_j N(y | y_j, h^2) ), evaluated in the log domain.
    double mx = -1e300;
    for (Index j = 0; j < s; ++j) {
      double d = (y_true(i) - y_samples(i, j)) / h;
      double lp = -0.5 * d * d;
      mx = std::max(mx, lp);
    }
    double acc = 0.0;
    for (Index j = 0; j < s; ++j) {
      double d = (y_true(i) - y_samples(i, j)) / h;
      acc += std::exp(-0.5 * d * d - mx);
    }
    double logdens = mx + std::log(acc / static_cast<double>(s)) -
                     std::log(h) - 0.5 * kLog2Pi;
    out.per_point(i) = -logdens;
  }
  out.mean = out.per_point.mean();
  return out;
}

RunSummary run_summary(const std::vector<double>& per_run_nll) {
  if (per_run_nll.empty()) throw Error("run_summary: no runs");
  RunSummary out;
  for (double v : per_run_nll) out.mean += v;
  out.mean /= static_cast<double>(per_run_nll.size());
  if (per_run_nll.size() > 1) {
    double acc = 0.0;
    for (double v : per_run_nll) acc += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(acc / static_cast<double>(per_run_nll.size() - 1));
  }
  return out;
}

namespace {
void write_pair_file(const std::string& path, const Matrix& x_star,
                     const Matrix& samples, const std::string& value_name,
                     const std::string& hash) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_plotdata: cannot open '" + path + "'");
  out.precision(17);
  if (!hash.empty()) out << "# config=" << hash << "\n";
  for (Index j = 0; j < x_star.cols(); ++j) out << "x" << j << ",";
  out << value_name << "\n";
  for (Index i = 0; i < samples.rows(); ++i) {
    for (Index sIdx = 0; sIdx < samples.cols(); ++sIdx) {
      for (Index j = 0; j < x_star.cols(); ++j) out << x_star(i, j) << ",";
      out << samples(i, sIdx) << "\n";
    }
  }
  if (!out) throw IoError("emit_plotdata: write failed for '" + path + "'");
}
}  // namespace

void emit_plotdata(const PredictiveSampleSet& samples, const Matrix& x_star,
                   const std::string& out_dir,
                   const std::vector<PlotTrace>& traces) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  if (samples.y_samples.rows() != x_star.rows()) {
    throw DimensionMismatch("emit_plotdata: sample/point mismatch");
  }
  write_pair_file(out_dir + "/samples_y.csv", x_star, samples.y_samples,
                  "y_sample", samples.config_hash);
  if (samples.f_samples) {
    write_pair_file(out_dir + "/samples_f.csv", x_star, *samples.f_samples,
                    "f_sample", samples.config_hash);
  }
  if (!traces.empty()) {
    std::ofstream out(out_dir + "/traces.csv");
    if (!out) throw IoError("emit_plotdata: cannot open traces.csv");
    out.precision(17);
    if (!samples.config_hash.empty()) out << "# config=" << samples.config_hash << "\n";
    for (Index j = 0; j < x_star.cols(); ++j) out << "x" << j << ",";
    for (size_t t = 0; t < traces.size(); ++t) {
      out << traces[t].name << (t + 1 < traces.size() ? "," : "");
    }
    out << "\n";
    for (Index i = 0; i < x_star.rows(); ++i) {
      for (Index j = 0; j < x_star.cols(); ++j) out << x_star(i, j) << ",";
      for (size_t t = 0; t < traces.size(); ++t) {
        out << traces[t].values(i) << (t + 1 < traces.size() ? "," : "");
      }
      out << "\n";
    }
  }
  std::ofstream doc(out_dir + "/columns.txt");
  doc << "samples_y.csv: one row per (test point, sample); columns x0..x{d-1}"
         " are test inputs, y_sample is one draw from p(y*|y).\n";
  if (samples.f_samples) {
    doc << "samples_f.csv: same layout; f_sample is a draw of the latent"
           " function path.\n";
  }
  if (!traces.empty()) {
    doc << "traces.csv: one row per test point; named per-point curves"
           " (learned quantities such as modulation bands).\n";
  }
  doc << "model=" << samples.model_kind << " seed=" << samples.seed
      << " config=" << samples.config_hash << "\n";
}

}  // namespace mgp
