#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mgp/svgp.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mgp;

namespace {

SvgpModel random_model(RngState& rng, int n_inducing, int dim,
                       double noise = 0.5) {
  SeArdKernel k = SeArdKernel::create(dim, 0.9, 1.3);
  Matrix z = rng.std_normal_matrix(n_inducing, dim);
  SvgpModel m = SvgpModel::create(std::move(k), z, noise);
  m.block.m.leaf_value() = rng.std_normal_matrix(n_inducing, 1);
  m.block.s_raw.leaf_value() += 0.3 * rng.std_normal_matrix(n_inducing, n_inducing);
  return m;
}

// Tiny in-test Adam on a fixed parameter list.
void adam_steps(const std::function<Tensor()>& loss,
                std::vector<Tensor> params, int iters, double lr) {
  std::vector<Matrix> m1, m2;
  for (auto& p : params) {
    m1.push_back(Matrix::Zero(p.rows(), p.cols()));
    m2.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
  for (int t = 1; t <= iters; ++t) {
    auto g = grad(loss(), params, true);
    for (size_t i = 0; i < params.size(); ++i) {
      m1[i] = 0.9 * m1[i] + 0.1 * g[i];
      m2[i] = (0.999 * m2[i].array() + 0.001 * g[i].array().square()).matrix();
      double c1 = 1.0 - std::pow(0.9, t), c2 = 1.0 - std::pow(0.999, t);
      params[i].leaf_value().array() -=
          lr * (m1[i].array() / c1) /
          ((m2[i].array() / c2).sqrt() + 1e-8);
    }
  }
}

}  // namespace

TEST_CASE("marginal mean is zero when m and prior mean are zero") {
  RngState rng(31);
  SvgpModel m = random_model(rng, 4, 2);
  m.block.m.leaf_value().setZero();
  Matrix x = rng.std_normal_matrix(6, 2);
  GaussianMarginals g = m.block.marginals(Tensor::constant(x));
  CHECK(g.mean.value().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("S = K_MM collapses the variance bracket to the prior variance") {
  RngState rng(32);
  SeArdKernel k = SeArdKernel::create(1, 1.0, 1.5);
  Matrix z(3, 1);
  z << -1.0, 0.2, 1.4;
  SvgpModel m = SvgpModel::create(std::move(k), z, 0.1);
  // Set S to the exact (unjittered) K_MM via its factor.
  Matrix kmm =
      oracle::se_ard_gram(z, z, Vector::Ones(1), 1.5);
  Matrix l = Eigen::LLT<Matrix>(kmm).matrixL();
  Matrix raw = l.triangularView<Eigen::StrictlyLower>();
  raw.diagonal() = l.diagonal().array().log();
  m.block.s_raw.leaf_value() = raw;
  m.block.m.leaf_value() << 0.4, -0.2, 0.9;

  GaussianMarginals g = m.block.marginals(Tensor::constant(z));
  CHECK((g.var.value().array() - 1.5).abs().maxCoeff() <= 1e-4);
}

TEST_CASE("marginals match the dense-inverse oracle") {
  RngState rng(33);
  SvgpModel m = random_model(rng, 3, 2);
  Matrix x = rng.std_normal_matrix(4, 2);
  InducingBlock::Prep p = m.block.prep();
  GaussianMarginals g = m.block.marginals(p, Tensor::constant(x), true);

  Vector ls = m.block.kernel.log_lengthscales.value().array().exp();
  double sv = m.block.kernel.signal_variance().scalar();
  const Matrix& z = m.block.z.value();
  Matrix kmm = oracle::se_ard_gram(z, z, ls, sv);
  kmm.diagonal().array() += p.jitter_used;
  Matrix knm = oracle::se_ard_gram(x, z, ls, sv);
  Matrix knn = oracle::se_ard_gram(x, x, ls, sv);
  Matrix kinv = kmm.inverse();
  Matrix s = p.l_s.value() * p.l_s.value().transpose();
  Vector mean = knm * kinv * m.block.m.value();
  Matrix cov = knn - knm * kinv * (Matrix::Identity(3, 3) - s * kinv) * knm.transpose();

  CHECK((g.mean.value().col(0) - mean).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((g.var.value().col(0) - cov.diagonal()).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((g.cov->value() - cov).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("KL is zero at the prior and matches the scalar formula") {
  RngState rng(34);
  SeArdKernel k = SeArdKernel::create(1, 1.0, 2.0);
  Matrix z(2, 1);
  z << -0.8, 1.1;
  SvgpModel m = SvgpModel::create(std::move(k), z, 0.1);
  Matrix kmm = oracle::se_ard_gram(z, z, Vector::Ones(1), 2.0);
  kmm.diagonal().array() += m.block.prep().jitter_used;
  Matrix l = Eigen::LLT<Matrix>(kmm).matrixL();
  Matrix raw = l.triangularView<Eigen::StrictlyLower>();
  raw.diagonal() = l.diagonal().array().log();
  m.block.s_raw.leaf_value() = raw;
  m.block.m.leaf_value().setZero();
  CHECK(std::abs(m.block.kl_to_prior().scalar()) <= 1e-9);

  // M=1: K=1, S=1, m=2 -> 0.5 m^2 = 2.
  SeArdKernel k1 = SeArdKernel::create(1, 1.0, 1.0);
  Matrix z1(1, 1);
  z1 << 0.0;
  SvgpModel m1 = SvgpModel::create(std::move(k1), z1, 0.1);
  m1.block.s_raw.leaf_value().setZero();  // S = exp(0)^2 = 1
  m1.block.m.leaf_value() << 2.0;
  CHECK(m1.block.kl_to_prior().scalar() == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("KL matches a Monte Carlo estimate of E_q[log q - log p]") {
  RngState rng(35);
  SvgpModel m = random_model(rng, 5, 2);
  InducingBlock::Prep p = m.block.prep();
  double kl = m.block.kl_to_prior(p).scalar();

  const Matrix ls = p.l_s.value();
  Matrix lk = p.l_kmm.value();
  const Vector mean = m.block.m.value().col(0);
  double logdet_s = 2.0 * ls.diagonal().array().log().sum();
  double logdet_k = 2.0 * lk.diagonal().array().log().sum();
  const int n = 1000000;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    Vector eps = rng.std_normal_matrix(5, 1);
    Vector u = mean + ls * eps;
    double logq = -0.5 * (5 * oracle::kLog2Pi + logdet_s + eps.squaredNorm());
    Vector w = lk.triangularView<Eigen::Lower>().solve(u);
    double logp = -0.5 * (5 * oracle::kLog2Pi + logdet_k + w.squaredNorm());
    vals[i] = logq - logp;
  }
  auto est = oracle::mc_mean(vals);
  CHECK(std::abs(kl - est.mean) <= 3.0 * est.stderr_);
  CHECK(kl >= 0.0);
}

TEST_CASE("minibatch estimator averages back to the full ELBO") {
  RngState rng(36);
  SvgpModel m = random_model(rng, 3, 1);
  const int n = 7;
  Matrix x = rng.std_normal_matrix(n, 1);
  Vector y = rng.std_normal_matrix(n, 1);

  double full = m.elbo(x, y, n).scalar();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    Matrix xi = x.row(i);
    Vector yi(1);
    yi << y(i);
    acc += m.elbo(xi, yi, n).scalar();
  }
  CHECK(acc / n == doctest::Approx(full).epsilon(1e-10));
}

TEST_CASE("one-point symbolic ELBO value") {
  SeArdKernel k = SeArdKernel::create(1, 1.0, 1.0);
  Matrix z(1, 1);
  z << 0.0;
  SvgpModel m = SvgpModel::create(std::move(k), z, 1.0);
  m.block.m.leaf_value() << 0.0;
  m.block.s_raw.leaf_value() << 0.0;  // S = 1
  Matrix x(1, 1);
  x << 0.0;
  Vector y(1);
  y << 0.0;
  // E[log N(0|f,1)] = -log(2pi)/2 - (mu^2 + nu)/2 with mu=0, nu=1; KL ~ 0.
  double expected = -0.5 * oracle::kLog2Pi - 0.5;
  CHECK(m.elbo(x, y, 1).scalar() == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("prediction adds the noise variance") {
  RngState rng(37);
  SvgpModel m = random_model(rng, 4, 1, 0.3);
  Matrix xs = rng.std_normal_matrix(5, 1);
  GaussianMarginals f = m.block.marginals(Tensor::constant(xs));
  GaussianMarginals p = m.predict(xs);
  CHECK((p.var.value() - f.var.value()).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.3).epsilon(1e-9));
  CHECK((p.var.value().array() >= 0.3 - 1e-12).all());
  CHECK((p.mean.value() - f.mean.value()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trained M=N model reproduces exact GP regression") {
  RngState rng(38);
  const int n = 3;
  Matrix x(n, 1);
  x << -1.0, 0.1, 0.9;
  Vector y(n);
  y << 0.3, -0.6, 0.8;
  SeArdKernel k = SeArdKernel::create(1, 1.0, 1.0);
  SvgpModel m = SvgpModel::create(std::move(k), x, 0.1);

  auto loss = [&] { return neg(m.elbo(x, y, n)); };
  adam_steps(loss, {m.block.m, m.block.s_raw}, 4000, 0.02);

  Matrix xs(4, 1);
  xs << -1.2, -0.4, 0.3, 1.1;
  GaussianMarginals pred = m.block.marginals(Tensor::constant(xs));

  Vector ls = Vector::Ones(1);
  Matrix knn = oracle::se_ard_gram(x, x, ls, 1.0);
  Matrix ksn = oracle::se_ard_gram(xs, x, ls, 1.0);
  Vector ksd = Vector::Constant(4, 1.0);
  Vector mean, var;
  oracle::dense_gp_predict(knn, ksn, ksd, y, 0.1, &mean, &var);
  CHECK((pred.mean.value().col(0) - mean).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("Nystrom consistency when Z covers the data") {
  RngState rng(39);
  SeArdKernel k = SeArdKernel::create(2, 1.2, 0.9);
  Matrix x = rng.std_normal_matrix(5, 2);
  Vector ls = k.log_lengthscales.value().array().exp();
  Matrix g = oracle::se_ard_gram(x, x, ls, 0.9);
  Matrix rec = g * g.ldlt().solve(g);
  CHECK((rec - g).norm() / g.norm() <= 1e-8);
}

TEST_CASE("ELBO lower-bounds the dense log marginal likelihood") {
  RngState rng(40);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 3 + static_cast<int>(rng.uniform() * 17);
    int mm = 1 + static_cast<int>(rng.uniform() * 5);
    SvgpModel m = random_model(rng, mm, 1, 0.2 + rng.uniform());
    Matrix x = rng.std_normal_matrix(n, 1);
    Vector y = rng.std_normal_matrix(n, 1);
    double elbo = m.elbo(x, y, n).scalar();
    Vector ls = m.block.kernel.log_lengthscales.value().array().exp();
    double sv = m.block.kernel.signal_variance().scalar();
    Matrix knn = oracle::se_ard_gram(x, x, ls, sv);
    double logml = oracle::dense_log_marginal(knn, y, m.noise.value());
    CHECK(elbo <= logml + 1e-8);
  }
}

TEST_CASE("ELBO gradient passes finite differences") {
  RngState rng(41);
  SvgpModel m = random_model(rng, 3, 2);
  Matrix x = rng.std_normal_matrix(5, 2);
  Vector y = rng.std_normal_matrix(5, 1);
  auto build = [&] { return m.elbo(x, y, 12); };
  double err = testutil::fd_max_rel_error(
      build,
      {m.block.m, m.block.s_raw, m.block.z, m.block.kernel.log_lengthscales,
       m.block.kernel.log_signal_variance, m.noise.log_variance});
  CHECK(err <= 1e-4);
}
