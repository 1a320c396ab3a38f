#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mgp/rng.hpp"

namespace mgp {

/// Per-column affine transform recorded at standardization time so that
/// predictions can be mapped back to original units exactly once.
struct Standardizer {
  Vector x_mean, x_std;
  double y_mean = 0.0, y_std = 1.0;

  Matrix transform_x(const Matrix& x) const;
  Vector transform_y(const Vector& y) const;
  Vector inverse_y(const Vector& y) const;
  Matrix inverse_y(const Matrix& y) const;
};

struct Dataset {
  Matrix x;
  Vector y;
  std::vector<std::string> feature_names;
  std::string target_name = "y";
  std::optional<Standardizer> standardizer;  // present once standardized

  long n() const { return x.rows(); }
  int dim() const { return static_cast<int>(x.cols()); }
};

// Mean and noise standard deviation of the heteroscedastic toy case.
double toy_het_mean(double x);
double toy_het_noise_sd(double x);

/// Toy generators: "heteroscedastic" (x in [-2,2]), "step" (transition at
/// x = 0.5, noise sd 0.01), "moon" (two interleaved half-circles; input is
/// the first coordinate, target the second).
Dataset gen_toy(const std::string& case_name, long n, std::uint64_t seed,
                double moon_noise = 0.05);

/// Rectangular numeric CSV with a header row; lines starting with '#' are
/// skipped. Throws ParseError / NonNumericColumn with row/column locations.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 char delimiter = ',');

void save_csv(const Dataset& ds, const std::string& path,
              const std::vector<std::string>& comment_lines = {});

/// Shuffled split; the test set holds floor(fraction * n) points.
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed);

/// Zero-mean unit-variance columns; constant columns keep std 1. Records the
/// transform for inverse mapping.
Dataset standardize(const Dataset& ds);

/// Applies a training-split transform to held-out data.
Dataset apply_standardizer(const Dataset& ds, const Standardizer& s);

/// Lloyd's algorithm with k-means++ seeding, at most 50 iterations.
Matrix kmeans_init(const Matrix& x, int k, std::uint64_t seed);

}  // namespace mgp
