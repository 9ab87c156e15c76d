#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bilevel/igfm.hpp"
#include "bilevel/problems.hpp"

using namespace bilevel;

TEST_CASE("two-point estimate on a linear function recovers d*(c'u)u") {
  const DenseVector c{1.0, -2.0, 0.5};
  const ValueEstimator phi = [&c](const DenseVector& v) { return c.dot(v); };
  Rng rng(1);
  OracleCounter counter;
  const DenseVector x{0.3, 0.1, -0.2};
  for (int i = 0; i < 10; ++i) {
    const DenseVector u = sample_unit_sphere(rng, 3);
    const DenseVector est = two_point_estimate(phi, x, u, 0.05, 3, counter);
    const DenseVector want = (3.0 * c.dot(u)) * u;
    CHECK((est - want).norm() <= 1e-10);
  }
  CHECK(counter.zo_phi == 20);  // exactly two value queries per estimate
}

TEST_CASE("two-point estimate vanishes on constants and at symmetric points") {
  OracleCounter counter;
  Rng rng(2);
  const ValueEstimator constant = [](const DenseVector&) { return 42.0; };
  const ValueEstimator sqnorm = [](const DenseVector& v) { return v.squared_norm(); };
  for (int i = 0; i < 5; ++i) {
    const DenseVector u = sample_unit_sphere(rng, 4);
    CHECK(two_point_estimate(constant, DenseVector(4, 0.7), u, 0.1, 4, counter).norm() ==
          0.0);
    // Even function at the origin: the symmetric difference cancels exactly.
    CHECK(two_point_estimate(sqnorm, DenseVector(4, 0.0), u, 0.1, 4, counter).norm() ==
          0.0);
  }
}

TEST_CASE("direction must be a unit vector") {
  OracleCounter counter;
  const ValueEstimator phi = [](const DenseVector& v) { return v[0]; };
  CHECK_THROWS_AS(
      two_point_estimate(phi, DenseVector{0.0}, DenseVector{2.0}, 0.1, 1, counter),
      ContractViolation);
}

TEST_CASE("single zero-step iteration returns the start point") {
  IgfmParams p;
  p.eta = 0.0;
  p.big_t = 1;
  p.delta = 0.1;
  const ValueEstimator phi = [](const DenseVector& v) { return v.squared_norm(); };
  Rng rng(3);
  OracleCounter counter;
  const IgfmResult res = igfm_run_with_estimator(phi, DenseVector{0.4}, p, rng, counter);
  CHECK(res.x_out[0] == 0.4);
  CHECK(counter.zo_phi == 2);
}

TEST_CASE("query accounting over a full run") {
  IgfmParams p;
  p.eta = 0.01;
  p.big_t = 17;
  p.delta = 0.05;
  const ValueEstimator phi = [](const DenseVector& v) { return v.squared_norm(); };
  Rng rng(4);
  OracleCounter counter;
  igfm_run_with_estimator(phi, DenseVector{1.0, 1.0}, p, rng, counter);
  CHECK(counter.zo_phi == 2 * 17);
}

TEST_CASE("bundled-problem runs are reproducible and warm-started") {
  const BilevelProblem p = make_pl_remark2();
  IgfmParams params;
  params.eta = 0.01;
  params.big_t = 12;
  params.delta = 0.1;
  params.sub_zeta = 0.02;
  params.sub_params = sgm_schedule(p.constants, params.sub_zeta);
  Rng r1(7), r2(7);
  OracleCounter c1, c2;
  const IgfmResult a = igfm_run(p, DenseVector{1.1}, DenseVector{0.95, 0.95}, params, r1, c1);
  const IgfmResult b = igfm_run(p, DenseVector{1.1}, DenseVector{0.95, 0.95}, params, r2, c2);
  CHECK(a.x_out == b.x_out);
  CHECK(c1 == c2);
  CHECK(c1.zo_phi == 2 * 12);
  CHECK(c1.gc_f + c1.gc_g > 0);  // sub-solver queries attributed to f/g
  CHECK(c1.jv_g == 0);
  CHECK(c1.hv_g == 0);
}
