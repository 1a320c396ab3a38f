#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mgp/evalkit.hpp"
#include "oracles.hpp"

using namespace mgp;

TEST_CASE("degenerate sample set falls back to the documented bandwidth") {
  Matrix samples = Matrix::Constant(1, 50, 2.5);
  Vector truth(1);
  truth << 2.5;
  KdeNllResult r = kde_nll(samples, truth);
  CHECK(r.bandwidth_fallback);
  double h = 1e-3 * (1.0 + 2.5);
  CHECK(r.per_point(0) == doctest::Approx(std::log(h * std::sqrt(2.0 * M_PI))));
}

TEST_CASE("KDE NLL approaches the analytic standard normal density") {
  RngState rng(5);
  const int s = 10000;
  Matrix samples(1, s);
  for (int j = 0; j < s; ++j) samples(0, j) = rng.normal();
  Vector truth(1);
  truth << 0.0;
  KdeNllResult r = kde_nll(samples, truth);
  CHECK(std::abs(r.per_point(0) - 0.9189) <= 0.05);
}

TEST_CASE("identical points give identical NLL and permutation does not matter") {
  RngState rng(6);
  Matrix one(1, 200);
  for (int j = 0; j < 200; ++j) one(0, j) = rng.normal() * 1.3 + 0.4;
  Matrix two(2, 200);
  two.row(0) = one.row(0);
  two.row(1) = one.row(0);
  Vector truth(2);
  truth << 0.1, 0.1;
  KdeNllResult r = kde_nll(two, truth);
  CHECK(r.per_point(0) == r.per_point(1));

  std::vector<int> perm = rng.permutation(200);
  Matrix shuffled(2, 200);
  for (int j = 0; j < 200; ++j) shuffled.col(j) = two.col(perm[j]);
  KdeNllResult rp = kde_nll(shuffled, truth);
  CHECK(rp.per_point(0) == doctest::Approx(r.per_point(0)).epsilon(1e-12));
}

TEST_CASE("standardized-space NLL plus log sigma_y equals original-space NLL") {
  RngState rng(7);
  const double y_std = 3.7, y_mean = -1.2;
  Matrix orig(3, 400);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 400; ++j) orig(i, j) = y_mean + y_std * (rng.normal() + i);
  Vector truth_orig(3);
  truth_orig << -1.0, 2.4, 5.0;

  Matrix std_samples = (orig.array() - y_mean) / y_std;
  Vector truth_std = (truth_orig.array() - y_mean) / y_std;

  KdeNllResult a = kde_nll(orig, truth_orig);
  KdeNllResult b = kde_nll(std_samples, truth_std);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.per_point(i) == doctest::Approx(b.per_point(i) + std::log(y_std)).epsilon(1e-10));
  }
}

TEST_CASE("run summary mean and sample std") {
  RunSummary one = run_summary({2.0});
  CHECK(one.mean == 2.0);
  CHECK(one.stddev == 0.0);

  RunSummary three = run_summary({1.0, 2.0, 3.0});
  CHECK(three.mean == doctest::Approx(2.0));
  CHECK(three.stddev == doctest::Approx(1.0));

  // Ten simulated runs against a spreadsheet-style recomputation.
  RngState rng(8);
  std::vector<double> runs;
  for (int i = 0; i < 10; ++i) runs.push_back(rng.normal() * 0.3 + 1.5);
  RunSummary rs = run_summary(runs);
  double m = 0.0;
  for (double v : runs) m += v;
  m /= 10.0;
  double sd = 0.0;
  for (double v : runs) sd += (v - m) * (v - m);
  sd = std::sqrt(sd / 9.0);
  CHECK(rs.mean == m);
  CHECK(rs.stddev == sd);
}

TEST_CASE("plot data files have the size contract and round trip") {
  RngState rng(9);
  const int n = 7, s = 5;
  PredictiveSampleSet set;
  set.y_samples = rng.std_normal_matrix(n, s);
  set.f_samples = rng.std_normal_matrix(n, s);
  set.model_kind = "shgp";
  set.seed = 11;
  set.config_hash = "cafef00d";
  Matrix xs = rng.std_normal_matrix(n, 1);

  const std::string dir = "/tmp/mgp_plotdata";
  std::filesystem::remove_all(dir);
  emit_plotdata(set, xs, dir,
                {{"w_mean", rng.std_normal_matrix(n, 1).col(0)}});

  std::ifstream in(dir + "/samples_y.csv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# config=cafef00d");
  std::getline(in, line);
  CHECK(line == "x0,y_sample");
  long rows = 0;
  double max_err = 0.0;
  while (std::getline(in, line)) {
    double xv, yv;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &xv, &yv) == 2);
    long i = rows / s, j = rows % s;
    max_err = std::max(max_err, std::abs(xv - xs(i, 0)));
    max_err = std::max(max_err, std::abs(yv - set.y_samples(i, j)));
    ++rows;
  }
  CHECK(rows == n * s);
  CHECK(max_err == 0.0);
  CHECK(std::filesystem::exists(dir + "/samples_f.csv"));
  CHECK(std::filesystem::exists(dir + "/traces.csv"));
  CHECK(std::filesystem::exists(dir + "/columns.txt"));
}
