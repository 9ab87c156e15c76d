#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "bilevel/agd.hpp"
#include "bilevel/linalg.hpp"

using namespace bilevel;

TEST_CASE("unit quadratic is solved in one exact step") {
  const GradOracle grad = [](const DenseVector& z) { return z; };  // h = z^2/2
  AgdParams p;
  p.step_alpha = 1.0;
  p.momentum_beta = 0.0;
  p.iters = 1;
  const DenseVector out = agd_run(grad, DenseVector{1.0}, p);
  CHECK(out[0] == 0.0);
}

TEST_CASE("zero iterations return the start point") {
  const GradOracle grad = [](const DenseVector& z) { return z; };
  AgdParams p;
  p.step_alpha = 0.1;
  p.momentum_beta = 0.5;
  p.iters = 0;
  const DenseVector z0{0.3, -0.7};
  CHECK(agd_run(grad, z0, p) == z0);
}

TEST_CASE("step/momentum rule from the moduli") {
  AgdParams p = agd_params_for(1.0, 1.0);
  CHECK(p.step_alpha == 1.0);
  CHECK(p.momentum_beta == 0.0);
  p = agd_params_for(4.0, 1.0);
  CHECK(p.step_alpha == 0.25);
  CHECK(p.momentum_beta == doctest::Approx(1.0 / 3.0));
  p = agd_params_for(100.0, 1.0);
  CHECK(p.step_alpha == 0.01);
  CHECK(p.momentum_beta == doctest::Approx(9.0 / 11.0));
  CHECK_THROWS_AS(agd_params_for(1.0, 0.0), ContractViolation);
  CHECK_THROWS_AS(agd_params_for(0.5, 1.0), ContractViolation);
}

TEST_CASE("diagonal (1,10) instance meets the contraction bound") {
  const GradOracle grad = [](const DenseVector& z) {
    return DenseVector{z[0], 10.0 * z[1]};
  };
  AgdParams p = agd_params_for(10.0, 1.0);
  p.iters = 50;
  const DenseVector z0{1.0, 1.0};
  const DenseVector zT = agd_run(grad, z0, p);
  const double bound = 11.0 * std::pow(1.0 - 1.0 / std::sqrt(10.0), 50) * 2.0;
  CHECK(zT.squared_norm() <= bound + 1e-18);
}

TEST_CASE("rate law holds on random strongly convex quadratics") {
  Rng rng(77);
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t d = 2 + rng.uniform_int(10);
    const double kappa = std::exp(rng.uniform(0.0, std::log(500.0)));
    const Mat u = random_orthogonal(rng, d);
    Mat a(d, d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      const double eig = k == 0 ? 1.0 : (k == d - 1 ? kappa : rng.uniform(1.0, kappa));
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a(i, j) += eig * u(i, k) * u(j, k);
    }
    DenseVector z_star(d), z0(d);
    for (std::size_t i = 0; i < d; ++i) {
      z_star[i] = rng.uniform(-1.0, 1.0);
      z0[i] = rng.uniform(-1.0, 1.0);
    }
    const DenseVector b = matvec(a, z_star);
    AgdParams p = agd_params_for(kappa, 1.0);
    const double dist0 = (z0 - z_star).squared_norm();
    const double floor = std::pow(1e-10 * (1.0 + z_star.norm()), 2);
    for (const std::int64_t T : {1, 10, 100}) {
      p.iters = T;
      const DenseVector zT =
          agd_run([&](const DenseVector& z) { return matvec(a, z) - b; }, z0, p);
      const double bound = (1.0 + kappa) *
                           std::pow(1.0 - 1.0 / std::sqrt(kappa), static_cast<double>(T)) *
                           dist0;
      CHECK((zT - z_star).squared_norm() <= bound * (1.0 + 1e-9) + floor);
    }
  }
}

TEST_CASE("zero momentum reduces to plain gradient descent bit-for-bit") {
  Rng rng(5);
  const Mat a = random_orthogonal(rng, 4);  // any matrix works for the identity check
  const GradOracle grad = [&a](const DenseVector& z) { return matvec(a, z); };
  AgdParams p;
  p.step_alpha = 0.07;
  p.momentum_beta = 0.0;
  p.iters = 37;
  DenseVector z0(4);
  for (std::size_t i = 0; i < 4; ++i) z0[i] = rng.uniform(-1.0, 1.0);

  DenseVector ref = z0;
  for (int t = 0; t < 37; ++t) ref = sub_scaled(ref, 0.07, matvec(a, ref));
  CHECK(agd_run(grad, z0, p) == ref);
}

TEST_CASE("query accounting and optional early exit") {
  std::uint64_t queries = 0;
  const GradOracle grad = [](const DenseVector& z) { return z; };
  AgdParams p;
  p.step_alpha = 0.5;
  p.momentum_beta = 0.2;
  p.iters = 23;
  agd_run(grad, DenseVector{1.0}, p, queries);
  CHECK(queries == 23);  // exactly T queries, no stopping test by default

  p.grad_tol = 1e-6;
  queries = 0;
  agd_run(grad, DenseVector{1.0}, p, queries);
  CHECK(queries < 23);  // early exit fired and the counter records actual queries
}

TEST_CASE("non-finite gradients abort with iterate context") {
  const GradOracle grad = [](const DenseVector&) {
    return DenseVector{std::numeric_limits<double>::quiet_NaN()};
  };
  AgdParams p;
  p.step_alpha = 1.0;
  p.iters = 3;
  CHECK_THROWS_AS(agd_run(grad, DenseVector{2.0}, p), NumericError);
  try {
    agd_run(grad, DenseVector{2.0}, p);
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}
