#include "mgp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "mgp/errors.hpp"

namespace mgp {

Matrix Standardizer::transform_x(const Matrix& x) const {
  Matrix out = x;
  for (Index j = 0; j < x.cols(); ++j) {
    out.col(j) = (x.col(j).array() - x_mean(j)) / x_std(j);
  }
  return out;
}

Vector Standardizer::transform_y(const Vector& y) const {
  return (y.array() - y_mean) / y_std;
}

Vector Standardizer::inverse_y(const Vector& y) const {
  return (y.array() * y_std + y_mean).matrix();
}

Matrix Standardizer::inverse_y(const Matrix& y) const {
  return (y.array() * y_std + y_mean).matrix();
}

double toy_het_mean(double x) { return std::cos(5.0 * x) * std::exp(-0.5 * x); }

double toy_het_noise_sd(double x) {
  return std::abs(0.25 * std::cos(6.0 * x + 1.0) * std::exp(-x));
}

Dataset gen_toy(const std::string& case_name, long n, std::uint64_t seed,
                double moon_noise) {
  if (n < 1) throw Error("gen_toy: n must be >= 1");
  RngState rng(seed);
  Dataset ds;
  ds.feature_names = {"x"};
  if (case_name == "heteroscedastic") {
    ds.x.resize(n, 1);
    ds.y.resize(n);
    for (long i = 0; i < n; ++i) {
      double x = -2.0 + 4.0 * rng.uniform();
      ds.x(i, 0) = x;
      ds.y(i) = toy_het_mean(x) +
                0.25 * std::cos(6.0 * x + 1.0) * std::exp(-x) * rng.normal();
    }
  } else if (case_name == "step") {
    ds.x.resize(n, 1);
    ds.y.resize(n);
    for (long i = 0; i < n; ++i) {
      double x = rng.uniform();
      ds.x(i, 0) = x;
      ds.y(i) = (x < 0.5 ? 0.0 : 1.0) + 0.01 * rng.normal();
    }
  } else if (case_name == "moon") {
    ds.x.resize(n, 1);
    ds.y.resize(n);
    const long n_out = n / 2;
    for (long i = 0; i < n; ++i) {
      double px, py;
      if (i < n_out) {
        double t = M_PI * (n_out > 1 ? static_cast<double>(i) / (n_out - 1) : 0.5);
        px = std::cos(t);
        py = std::sin(t);
      } else {
        long j = i - n_out;
        long n_in = n - n_out;
        double t = M_PI * (n_in > 1 ? static_cast<double>(j) / (n_in - 1) : 0.5);
        px = 1.0 - std::cos(t);
        py = 1.0 - std::sin(t) - 0.5;
      }
      ds.x(i, 0) = px + moon_noise * rng.normal();
      ds.y(i) = py + moon_noise * rng.normal();
    }
  } else {
    throw Error("gen_toy: unknown case '" + case_name + "'");
  }
  return ds;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column,
                 char delimiter) {
  std::ifstream in(path);
  if (!in) throw IoError("load_csv: cannot open '" + path + "'");
  std::string line;
  long line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    header = split_line(line, delimiter);
    for (auto& h : header) h = trim(h);
    break;
  }
  if (header.empty()) throw ParseError("load_csv: missing header row");

  long target_idx = -1;
  for (size_t j = 0; j < header.size(); ++j) {
    if (header[j] == target_column) target_idx = static_cast<long>(j);
  }
  if (target_idx < 0) {
    throw ParseError("load_csv: target column '" + target_column +
                     "' not in header");
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> cells = split_line(line, delimiter);
    if (cells.size() != header.size()) {
      throw ParseError("load_csv: row " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    std::vector<double> vals(cells.size());
    for (size_t j = 0; j < cells.size(); ++j) {
      const std::string cell = trim(cells[j]);
      char* end = nullptr;
      vals[j] = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw NonNumericColumn("load_csv: non-numeric value '" + cell +
                               "' at row " + std::to_string(line_no) +
                               ", column '" + header[j] + "'");
      }
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ParseError("load_csv: no data rows");

  Dataset ds;
  const long n = static_cast<long>(rows.size());
  const long d = static_cast<long>(header.size()) - 1;
  ds.x.resize(n, d);
  ds.y.resize(n);
  ds.target_name = target_column;
  for (size_t j = 0; j < header.size(); ++j) {
    if (static_cast<long>(j) != target_idx) ds.feature_names.push_back(header[j]);
  }
  for (long i = 0; i < n; ++i) {
    long col = 0;
    for (size_t j = 0; j < header.size(); ++j) {
      if (static_cast<long>(j) == target_idx) {
        ds.y(i) = rows[i][j];
      } else {
        ds.x(i, col++) = rows[i][j];
      }
    }
  }
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path,
              const std::vector<std::string>& comment_lines) {
  std::ofstream out(path);
  if (!out) throw IoError("save_csv: cannot open '" + path + "' for writing");
  out.precision(17);
  for (const auto& c : comment_lines) out << "# " << c << "\n";
  for (int j = 0; j < ds.dim(); ++j) out << ds.feature_names[j] << ",";
  out << ds.target_name << "\n";
  for (long i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < ds.dim(); ++j) out << ds.x(i, j) << ",";
    out << ds.y(i) << "\n";
  }
  if (!out) throw IoError("save_csv: write failed for '" + path + "'");
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed) {
  const long n = ds.n();
  const long n_test = static_cast<long>(test_fraction * static_cast<double>(n));
  RngState rng(seed);
  std::vector<int> perm = rng.permutation(static_cast<int>(n));
  Dataset train, test;
  train.feature_names = test.feature_names = ds.feature_names;
  train.target_name = test.target_name = ds.target_name;
  train.x.resize(n - n_test, ds.dim());
  train.y.resize(n - n_test);
  test.x.resize(n_test, ds.dim());
  test.y.resize(n_test);
  for (long i = 0; i < n_test; ++i) {
    test.x.row(i) = ds.x.row(perm[i]);
    test.y(i) = ds.y(perm[i]);
  }
  for (long i = n_test; i < n; ++i) {
    train.x.row(i - n_test) = ds.x.row(perm[i]);
    train.y(i - n_test) = ds.y(perm[i]);
  }
  return {train, test};
}

Dataset standardize(const Dataset& ds) {
  Standardizer s;
  const long n = ds.n();
  s.x_mean.resize(ds.dim());
  s.x_std.resize(ds.dim());
  for (int j = 0; j < ds.dim(); ++j) {
    s.x_mean(j) = ds.x.col(j).mean();
    double var = (ds.x.col(j).array() - s.x_mean(j)).square().sum() / n;
    s.x_std(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  s.y_mean = ds.y.mean();
  double yvar = (ds.y.array() - s.y_mean).square().sum() / n;
  s.y_std = yvar > 1e-24 ? std::sqrt(yvar) : 1.0;

  Dataset out = ds;
  out.x = s.transform_x(ds.x);
  out.y = s.transform_y(ds.y);
  out.standardizer = s;
  return out;
}

Dataset apply_standardizer(const Dataset& ds, const Standardizer& s) {
  Dataset out = ds;
  out.x = s.transform_x(ds.x);
  out.y = s.transform_y(ds.y);
  out.standardizer = s;
  return out;
}

Matrix kmeans_init(const Matrix& x, int k, std::uint64_t seed) {
  const long n = x.rows();
  if (k > n) throw Error("kmeans_init: k exceeds number of points");
  RngState rng(seed);
  Matrix centers(k, x.cols());

  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::max());
  long first = static_cast<long>(rng.uniform() * n);
  centers.row(0) = x.row(std::min(first, n - 1));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (long i = 0; i < n; ++i) {
      double d = (x.row(i) - centers.row(c - 1)).squaredNorm();
      d2[i] = std::min(d2[i], d);
      total += d2[i];
    }
    long pick = n - 1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      double acc = 0.0;
      for (long i = 0; i < n; ++i) {
        acc += d2[i];
        if (u <= acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<long>(rng.uniform() * n);
    }
    centers.row(c) = x.row(pick);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (long i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (int c = 0; c < k; ++c) {
        double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<long> counts(k, 0);
    for (long i = 0; i < n; ++i) {
      sums.row(assign[i]) += x.row(i);
      counts[assign[i]]++;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
    }
  }
  return centers;
}

}  // namespace mgp
