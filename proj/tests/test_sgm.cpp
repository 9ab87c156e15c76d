#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bilevel/problems.hpp"
#include "bilevel/sgm.hpp"

using namespace bilevel;

namespace {

BilevelProblem abs_instance() {
  BilevelProblem p;
  p.name = "abs";
  p.d_x = 1;
  p.d_y = 1;
  p.f_val = [](const DenseVector&, const DenseVector& y) { return y[0]; };
  p.grad_f_x = [](const DenseVector&, const DenseVector&) { return DenseVector{0.0}; };
  p.grad_f_y = [](const DenseVector&, const DenseVector&) { return DenseVector{1.0}; };
  p.g_val = [](const DenseVector&, const DenseVector& y) { return std::abs(y[0]); };
  p.grad_g_x = [](const DenseVector&, const DenseVector&) { return DenseVector{0.0}; };
  p.grad_g_y = [](const DenseVector&, const DenseVector& y) {
    return DenseVector{y[0] > 0.0 ? 1.0 : (y[0] < 0.0 ? -1.0 : 0.0)};
  };
  const DenseVector lo{-1.0}, hi{1.0};
  p.project_y = [lo, hi](const DenseVector& v) { return project_box(v, lo, hi); };
  p.y_unconstrained = false;
  SmoothnessConstants c;
  c.c_f = 1.0;
  c.c_g = 1.0;
  c.radius_r = 2.0;
  c.sharp_mod = 0.5;
  c.hoelder = {1.0, 1.0};
  p.constants = c;
  GroundTruth t;
  t.phi = [](const DenseVector&) { return 0.0; };
  t.g_star = [](const DenseVector&) { return 0.0; };
  p.truth = std::move(t);
  return p;
}

}  // namespace

TEST_CASE("weak-sharp instance meets the accuracy contract") {
  const BilevelProblem p = abs_instance();
  OracleCounter counter;
  const SgmParams params = sgm_schedule(p.constants, 0.1);
  const SgmResult res = sgm_run(p, DenseVector{0.0}, DenseVector{1.0}, params, counter);
  CHECK(std::abs(res.y_out[0]) <= 0.1);
  CHECK(p.g_val(DenseVector{0.0}, res.y_out) - res.g_hat_star <=
        4.0 * params.sgm_threshold + 1e-12);
  CHECK(counter.jv_g == 0);
  CHECK(counter.hv_g == 0);
  CHECK(counter.proj > 0);
}

TEST_CASE("all-feasible runs average plain subgradient descent on the objective") {
  // g identically 0: every index enters the objective-step set and the output
  // is the running mean of projected subgradient descent on f.
  const BilevelProblem p = make_ex51();
  const DenseVector x{0.7};
  SgmParams params;
  params.k0 = 5;
  params.big_k = 40;
  params.tau = 0.05;
  params.sgm_threshold = 1e-3;
  OracleCounter counter;
  std::int64_t obj_steps = 0;
  const SgmObserver obs = [&obj_steps](const SgmIterInfo& info) {
    if (info.objective_step) ++obj_steps;
  };
  const SgmResult res = sgm_run(p, x, DenseVector{0.5}, params, counter, obs);
  CHECK(obj_steps == params.big_k);

  // Reference loop, bit-for-bit.
  DenseVector y{0.5};
  DenseVector sum(1, 0.0);
  const DenseVector lo{-1.0}, hi{1.0};
  for (int k = 0; k < params.big_k; ++k) {
    sum.axpy_in(1.0, y);
    y = project_box(sub_scaled(y, params.tau, p.grad_f_y(x, y)), lo, hi);
  }
  CHECK(res.y_out == (1.0 / static_cast<double>(params.big_k)) * sum);
}

TEST_CASE("gradient-dominated instance pins the first LL coordinate") {
  const BilevelProblem p = make_pl_remark2();
  const double zeta = 0.05;
  const SgmParams params = sgm_schedule(p.constants, zeta);
  OracleCounter counter;
  const SgmResult res =
      sgm_run(p, DenseVector{1.0}, DenseVector{0.95, 0.95}, params, counter);
  CHECK(std::abs(res.y_out[0] - 1.0) <= zeta);  // the LL solution set is y1 = 1
  CHECK(std::abs(p.f_val(DenseVector{1.0}, res.y_out) - 0.0) <= zeta);
}

TEST_CASE("per-step descent inequality on the convex instance") {
  // For the branch actually taken with step size tau on an L-Lipschitz convex
  // function h: h(y_k) - h(z) <= (||y_k - z||^2 - ||y_{k+1} - z||^2)/(2 tau)
  // + tau L^2 / 2, tracked at z = y*(x) = 0.
  const BilevelProblem p = abs_instance();
  const DenseVector x{0.0};
  const DenseVector z{0.0};
  const SgmParams params = sgm_schedule(p.constants, 0.2);
  int violations = 0;
  const SgmObserver obs = [&](const SgmIterInfo& info) {
    const double h_k = info.objective_step ? p.f_val(x, info.y) : p.g_val(x, info.y);
    const double h_z = info.objective_step ? p.f_val(x, z) : p.g_val(x, z);
    const double lhs = h_k - h_z;
    const double rhs = ((info.y - z).squared_norm() - (info.y_next - z).squared_norm()) /
                           (2.0 * params.tau) +
                       params.tau * 1.0 / 2.0;
    if (lhs > rhs + 1e-12) ++violations;
  };
  OracleCounter counter;
  sgm_run(p, x, DenseVector{1.0}, params, counter, obs);
  CHECK(violations == 0);
}

TEST_CASE("an unreachable switching threshold is reported as an error") {
  const BilevelProblem p = abs_instance();
  SgmParams params;
  params.k0 = 1000;    // warm-up lands near the optimum, so ghat* is tight
  params.big_k = 100;  // main phase cannot close a 1e-3 slack with 1e-9 steps
  params.tau = 1e-9;
  params.sgm_threshold = 1e-12;
  OracleCounter counter;
  CHECK_THROWS_WITH_AS(
      sgm_run(p, DenseVector{0.0}, DenseVector{1.0}, params, counter),
      doctest::Contains("near-feasibility"), NumericError);
}

TEST_CASE("trace rows carry the branch and the feasibility slack") {
  const BilevelProblem p = abs_instance();
  const SgmParams params = sgm_schedule(p.constants, 0.2);
  OracleCounter counter;
  const SgmResult res = sgm_run(p, DenseVector{0.0}, DenseVector{1.0}, params, counter);
  CHECK(!res.trace.rows.empty());
  bool saw_obj = false, saw_cons = false;
  for (const TraceRow& row : res.trace.rows) {
    if (row.epoch == 1) saw_obj = true;
    if (row.epoch == 0) saw_cons = true;
  }
  CHECK(saw_obj);
  CHECK(saw_cons);
  CHECK(res.trace.find_meta("g_hat_star") != nullptr);
}

TEST_CASE("parameter validation") {
  const BilevelProblem p = abs_instance();
  SgmParams bad;
  OracleCounter counter;
  CHECK_THROWS_AS(sgm_run(p, DenseVector{0.0}, DenseVector{1.0}, bad, counter),
                  ContractViolation);
}
