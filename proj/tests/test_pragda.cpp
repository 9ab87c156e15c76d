#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bilevel/agd.hpp"
#include "bilevel/diagnostics.hpp"
#include "bilevel/problems.hpp"

using namespace bilevel;

namespace {

// min_x max_y of -||y||^2/2 + x'y - ||x||^2/2. The inner maximum sits at
// y* = x, and substituting gives ||x||^2/2 - ||x||^2/2 = 0 identically.
MinimaxProblem make_concave_quadratic() {
  MinimaxProblem p;
  p.name = "concave-quadratic";
  p.d_x = 2;
  p.d_y = 2;
  p.fbar_val = [](const DenseVector& x, const DenseVector& y) {
    return -0.5 * y.squared_norm() + x.dot(y) - 0.5 * x.squared_norm();
  };
  p.grad_fbar_x = [](const DenseVector& x, const DenseVector& y) { return y - x; };
  p.grad_fbar_y = [](const DenseVector& x, const DenseVector& y) { return x - y; };
  SmoothnessConstants c;
  c.ell = 2.0;
  c.mu = 1.0;
  c.rho = 1e-6;  // any positive bound is valid for a quadratic
  c.big_m = 10.0;
  p.constants = c;
  GroundTruth t;
  t.phi = [](const DenseVector&) { return 0.0; };
  t.grad_phi = [](const DenseVector& x) { return DenseVector(x.size(), 0.0); };
  t.y_star = [](const DenseVector& x) { return x; };
  t.phi_star = 0.0;
  p.truth = std::move(t);
  return p;
}

}  // namespace

TEST_CASE("bilevel image negates the lower-level oracles") {
  const MinimaxProblem mm = make_wshape();
  const BilevelProblem blo = as_bilevel(mm);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const DenseVector x = sample_ball(rng, 3, 1.0);
    const DenseVector y = sample_ball(rng, 2, 1.0);
    CHECK((blo.grad_g_y(x, y) + mm.grad_fbar_y(x, y)).norm() == 0.0);
    CHECK((blo.grad_g_x(x, y) + mm.grad_fbar_x(x, y)).norm() == 0.0);
    CHECK(blo.g_val(x, y) == -mm.fbar_val(x, y));
    CHECK(blo.f_val(x, y) == mm.fbar_val(x, y));
  }
}

TEST_CASE("penalized value function collapses to the max for any weight above 1") {
  const MinimaxProblem mm = make_concave_quadratic();
  const BilevelProblem blo = as_bilevel(mm);
  Rng rng(3);
  for (const double lambda : {4.0, 8.0}) {  // at or above twice the condition number
    for (int i = 0; i < 5; ++i) {
      const DenseVector x = sample_ball(rng, 2, 2.0);
      // Inner argmins of f + lambda*g and of g, solved to machine accuracy.
      AgdParams agd_fg =
          agd_params_for((lambda + 1.0) * blo.constants.ell,
                         lambda * blo.constants.mu - blo.constants.ell);
      agd_fg.iters = 400;
      AgdParams agd_z = agd_params_for(blo.constants.ell, blo.constants.mu);
      agd_z.iters = 400;
      const DenseVector y_hat = agd_run(
          [&](const DenseVector& v) {
            DenseVector g = blo.grad_f_y(x, v);
            g.axpy_in(lambda, blo.grad_g_y(x, v));
            return g;
          },
          DenseVector(2, 0.0), agd_fg);
      const DenseVector z_hat = agd_run(
          [&](const DenseVector& v) { return blo.grad_g_y(x, v); }, DenseVector(2, 0.0),
          agd_z);
      const double lstar =
          blo.f_val(x, y_hat) + lambda * (blo.g_val(x, y_hat) - blo.g_val(x, z_hat));
      CHECK(lstar == doctest::Approx(mm.truth.phi(x)).epsilon(1e-8));
    }
  }
}

TEST_CASE("solver is stationary at the flat instance's critical point") {
  const MinimaxProblem mm = make_concave_quadratic();
  PragdaParams p;
  p.eta = 0.1;
  p.theta = 0.1;
  p.big_k = 50;
  p.big_b = 1.0;
  p.sigma = 1e-8;
  p.pert_radius = 0.0;  // stay put: zero-radius perturbation
  p.agd = agd_params_for(2.0, 1.0);
  p.eps = 1e-2;
  p.l_used = 4.0;
  p.rho_used = 1e-6;
  p.chat_coeff = 0.1;
  p.t_init = 30;
  p.t_step = 10;
  Rng rng(4);
  const PragdaResult res = pragda_run(mm, DenseVector(2, 0.0), p, rng, 1000);
  CHECK(res.x_hat.norm() == 0.0);  // all-zero dynamics are exact
}

TEST_CASE("W-shape run from the distant start reaches a second-order point") {
  const MinimaxProblem mm = make_wshape();
  PragdaParams p;
  p.eta = 1.0 / 240.0;
  p.theta = 0.02;
  p.big_k = 2000;
  p.big_b = 1e-3;
  p.sigma = 1e-8;
  p.pert_radius = 1e-4;
  p.agd = agd_params_for(21.0, 10.0);
  p.eps = 1e-3;
  p.l_used = 60.0;
  p.rho_used = 90.0;
  p.t_init = 40;
  p.t_step = 4;
  Rng rng(11);
  const PragdaResult res = pragda_run(mm, DenseVector{0.0, 0.0, 1.0}, p, rng, 30000);
  const auto [ok, rep] = sosp_check(mm.truth, res.x_hat, 1e-3, 0.0);
  CHECK(rep.grad_norm <= 1e-3);
  CHECK(*rep.hess_min_eig > 0.0);
  CHECK(res.counter.jv_g == 0);
  CHECK(res.counter.hv_g == 0);
}

TEST_CASE("declared concavity is spot-checkable") {
  const MinimaxProblem mm = make_wshape();
  Rng rng(5);
  CHECK(concavity_violation(mm, rng, 200) <= 1e-9);
  MinimaxProblem lying = mm;
  lying.constants.mu = 1000.0;  // overclaimed concavity must be detected
  CHECK(concavity_violation(lying, rng, 200) > 0.0);
}

TEST_CASE("hyper-objective Hessian variation stays under the minimax modulus") {
  const MinimaxProblem mm = make_wshape();
  const double kappa = mm.constants.ell / mm.constants.mu;
  const double rho_bar = 4.0 * std::sqrt(2.0) * kappa * kappa * kappa * mm.constants.rho;
  Rng rng(6);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    DenseVector x = sample_ball(rng, 3, 1.0);
    DenseVector xp = x;
    xp.axpy_in(1.0, sample_ball(rng, 3, 0.05));
    const Mat h1 = fd_hessian(mm.truth.phi, x);
    const Mat h2 = fd_hessian(mm.truth.phi, xp);
    double fro2 = 0.0;
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) fro2 += (h1(r, c) - h2(r, c)) * (h1(r, c) - h2(r, c));
    const double dist = (x - xp).norm();
    if (dist > 1e-6) worst = std::max(worst, std::sqrt(fro2) / dist);
  }
  CHECK(worst <= rho_bar);
}
