#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mgp/rng.hpp"
#include "mgp/tensor.hpp"
#include "test_util.hpp"

using namespace mgp;

TEST_CASE("cholesky identity and 2x2 hand factorization") {
  Tensor eye = Tensor::constant(Matrix(Matrix::Identity(3, 3)));
  CholeskyFactor f = cholesky_with_jitter(eye, 0.0, 1e-2);
  CHECK(f.jitter_used == 0.0);
  CHECK((f.lower.value() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));

  Matrix a(2, 2);
  a << 4, 2, 2, 3;
  Tensor l = cholesky(Tensor::constant(a));
  CHECK(l.value()(0, 0) == doctest::Approx(2.0));
  CHECK(l.value()(1, 0) == doctest::Approx(1.0));
  CHECK(l.value()(1, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(l.value()(0, 1) == 0.0);
}

TEST_CASE("cholesky reconstructs a random SPD matrix") {
  RngState rng(7);
  Matrix a = testutil::random_spd(10, rng);
  Tensor l = cholesky(Tensor::constant(a));
  Matrix rec = l.value() * l.value().transpose();
  double rel = (rec - a).norm() / a.norm();
  CHECK(rel <= 1e-10);
}

TEST_CASE("cholesky jitter escalation and failure") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  a(2, 2) = -5.0;  // indefinite; jitter cap cannot rescue it
  CHECK_THROWS_AS(cholesky_with_jitter(Tensor::constant(a), 1e-6, 1e-2),
                  NotPositiveDefinite);

  // Singular-but-PSD is rescued by escalation.
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = 1.0;
  CholeskyFactor f = cholesky_with_jitter(Tensor::constant(b), 0.0, 1e-2);
  CHECK(f.jitter_used > 0.0);
}

TEST_CASE("cholesky then solve matches direct dense solve") {
  RngState rng(21);
  Matrix a = testutil::random_spd(8, rng, 1.0);
  Vector b = rng.std_normal_matrix(8, 1);
  Tensor l = cholesky(Tensor::constant(a));
  Tensor x =
      tri_solve(l, tri_solve(l, Tensor::constant(Matrix(b)), false), true);
  Vector direct = a.ldlt().solve(b);
  CHECK((x.value().col(0) - direct).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("grad of x^2 at 3 is 6, grad of sum(exp(0)) is ones") {
  Tensor x = Tensor::parameter(3.0);
  Tensor y = square(x);
  auto g = grad(y, {x});
  CHECK(g[0](0, 0) == doctest::Approx(6.0));

  Tensor z = Tensor::parameter(Matrix(Matrix::Zero(4, 1)));
  Tensor w = sum(exp(z));
  auto gz = grad(w, {z});
  CHECK((gz[0] - Matrix::Ones(4, 1)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("grad is repeatable and flags untracked inputs") {
  Tensor x = Tensor::parameter(2.0);
  Tensor y = mul(x, x);
  auto g1 = grad(y, {x});
  auto g2 = grad(y, {x});
  CHECK(g1[0](0, 0) == g2[0](0, 0));

  Tensor stranger = Tensor::parameter(1.0);
  CHECK_THROWS_AS(grad(y, {stranger}), UntrackedInput);
  auto gz = grad(y, {stranger}, /*allow_unused=*/true);
  CHECK(gz[0](0, 0) == 0.0);
}

TEST_CASE("finite-difference pass over composite ops") {
  RngState rng(3);
  Tensor a = Tensor::parameter(rng.std_normal_matrix(4, 3));
  Tensor v = Tensor::parameter(rng.std_normal_matrix(3, 1));
  Tensor r = Tensor::parameter(rng.std_normal_matrix(1, 3));
  Tensor c = Tensor::parameter(rng.std_normal_matrix(4, 1));
  Tensor s = Tensor::parameter(0.7);

  auto build = [&] {
    Tensor m = matmul(a, diag_embed(exp(v)));
    m = add_rowvec(m, r);
    m = mul_colvec(m, sigmoid(c));
    Tensor t = softplus(m) + square(m) * 0.3 + mul(exp(s), m);
    Tensor u = sum(log(square(rowsum(t)) + 1.5)) +
               sum(log(square(transpose(colsum(t * 0.5))) + 1.5));
    return u + sum(relu(m)) + sum(sqrt(square(m) + 1.0));
  };
  double err = testutil::fd_max_rel_error(build, {a, v, r, c, s});
  CHECK(err <= 1e-4);
}

TEST_CASE("finite-difference pass over cholesky and solves") {
  RngState rng(11);
  Matrix base = testutil::random_spd(5, rng, 1.0);
  Tensor p = Tensor::parameter(base);
  Tensor b = Tensor::parameter(rng.std_normal_matrix(5, 2));

  auto build = [&] {
    // Symmetrize the parameter so cholesky's precondition holds when FD
    // probes individual entries.
    Tensor sym = (p + transpose(p)) * 0.5;
    Tensor l = cholesky(sym);
    Tensor x = tri_solve(l, b, false);
    Tensor y = tri_solve(l, x, true);
    return sum(square(y)) + sum(log(diag_part(l)));
  };
  double err = testutil::fd_max_rel_error(build, {p, b});
  CHECK(err <= 1e-4);
}

TEST_CASE("finite-difference pass over stack/slice/triangular ops") {
  RngState rng(17);
  Tensor a = Tensor::parameter(rng.std_normal_matrix(4, 4));
  Tensor b = Tensor::parameter(rng.std_normal_matrix(4, 2));

  auto build = [&] {
    Tensor ls = lower_triangular(a, true) + diag_embed(exp(diag_part(a)));
    Tensor st = hstack({b, matmul(ls, b)});
    Tensor sl = cols(st, 1, 2);
    return sum(square(sl)) + sum(clamp_min(st, 0.25));
  };
  double err = testutil::fd_max_rel_error(build, {a, b});
  CHECK(err <= 1e-4);
}

TEST_CASE("non-finite results are rejected") {
  Tensor z = Tensor::constant(0.0);
  CHECK_THROWS_AS(log(z), NonFiniteValue);
}

TEST_CASE("sampling moments: normal and gumbel") {
  RngState rng(42);
  const Index n = 1000000;
  Matrix z = rng.std_normal_matrix(n, 1);
  double mean = z.mean();
  double var = (z.array() - mean).square().sum() / (n - 1);
  CHECK(std::abs(mean) <= 0.01);
  CHECK(std::abs(var - 1.0) <= 0.01);

  Matrix g = rng.gumbel_matrix(n, 1);
  CHECK(std::abs(g.mean() - 0.5772156649) <= 0.01);
}

TEST_CASE("sampling is reproducible under a fixed seed") {
  RngState a(42), b(42);
  Matrix x = a.std_normal_matrix(3, 1);
  Matrix y = b.std_normal_matrix(3, 1);
  CHECK((x - y).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.position() == b.position());

  RngState c(42);
  Matrix u = c.gumbel_matrix(2, 2);
  RngState d(42);
  CHECK((u - d.gumbel_matrix(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}
