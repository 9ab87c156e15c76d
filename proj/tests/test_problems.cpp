#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bilevel/diagnostics.hpp"
#include "bilevel/problems.hpp"

using namespace bilevel;

TEST_CASE("one-dimensional quadratic instance by hand") {
  // g = (y - x)^2/2, f = x^2/2 + y^2/2: the LL solution is y = x and the
  // hyper-objective is x^2.
  QuadraticBlo::Data d;
  d.a = Mat::identity(1);
  d.b = Mat::identity(1);
  d.q = Mat::identity(1);
  d.s = Mat::identity(1);
  d.b0 = DenseVector{0.0};
  d.c_lin = DenseVector{0.0};
  d.p_lin = DenseVector{0.0};
  SmoothnessConstants c;
  c.mu = 1.0;
  c.ell = 2.0;
  c.big_m = 2.0;  // |grad_y f| = |y| bounded by 2 on the probe region
  d.constants = c;
  const QuadraticBlo qb(std::move(d));

  CHECK(qb.y_star(DenseVector{0.7})[0] == doctest::Approx(0.7));
  CHECK(qb.phi(DenseVector{0.7}) == doctest::Approx(0.49));
  CHECK(qb.grad_phi(DenseVector{0.0})[0] == doctest::Approx(0.0));
  CHECK(qb.grad_phi(DenseVector{0.7})[0] == doctest::Approx(1.4));
  // Penalized inner solution: (1 + lambda) y = lambda x.
  const double lambda = 5.0;
  CHECK(qb.y_star_penalized(DenseVector{1.0}, lambda)[0] ==
        doctest::Approx(lambda / (1.0 + lambda)));
  // Finite differences agree with the implicit-function route.
  const auto phi = [&qb](const DenseVector& x) { return qb.phi(x); };
  const DenseVector fd = fd_gradient(phi, DenseVector{0.7});
  CHECK(fd[0] == doctest::Approx(1.4).epsilon(1e-8));
}

TEST_CASE("random quadratic instances are deterministic in the seed") {
  Rng r1(9), r2(9);
  const QuadraticBlo a = make_quadratic(3, 4, r1, 10.0);
  const QuadraticBlo b = make_quadratic(3, 4, r2, 10.0);
  const DenseVector x{0.3, -0.2, 0.9};
  const DenseVector y{0.1, 0.4, -0.5, 0.2};
  CHECK(a.f(x, y) == b.f(x, y));
  CHECK(a.g(x, y) == b.g(x, y));
}

TEST_CASE("every bundled ground truth passes the FD consistency check") {
  Rng rng(13);
  const auto check = [&rng](const GroundTruth& t, int d_x, const char* name) {
    INFO(name);
    CHECK(ground_truth_fd_error(t, d_x, rng, 20) <= 1e-4);
  };
  check(make_quadratic_unit(4).as_problem().truth, 4, "quadratic-unit");
  Rng prng(1);
  check(make_quadratic(3, 5, prng, 20.0).as_problem().truth, 3, "quadratic-random");
  check(make_wshape().truth, 3, "wshape");
  check(make_zero_chain(ZeroChainVariant::smooth, 5).truth, 1, "zerochain-smooth");
  check(make_zero_chain(ZeroChainVariant::lipschitz, 5).truth, 1, "zerochain-lip");
  check(make_pl_remark2().truth, 1, "pl-remark2");
  check(make_ex41().truth, 1, "ex41");
  check(make_ex51().truth, 1, "ex51");
  check(make_adv_least_squares(20, 4, 1.0, prng).truth, 4, "advls");
}

TEST_CASE("W-shape glues to first order at all five breakpoints") {
  const double s = wshape_sqrt_eps();
  const double big_l = wshape_big_l();
  for (const double b : {-big_l * s, -s, 0.0, s, big_l * s}) {
    const double br = std::nextafter(b, 1e300);
    CHECK(std::abs(wshape_w(b) - wshape_w(br)) <= 1e-12);
    CHECK(std::abs(wshape_w1(b) - wshape_w1(br)) <= 1e-12);
  }
}

TEST_CASE("W-shape pinned values") {
  CHECK(wshape_w(0.0) == 0.0);
  // Adjacent branches agree at the inner breakpoint (continuity value).
  CHECK(wshape_w(0.1) == doctest::Approx(-0.001 + 0.001 / 3.0));
  CHECK(wshape_w(std::nextafter(0.1, 1.0)) == doctest::Approx(-0.001 + 0.001 / 3.0));
  // Saddle curvature is exactly -2 sqrt(eps).
  CHECK(wshape_w2(0.0) == -0.2);
  // The outer vertex is a stationary point of w.
  const double vertex = (wshape_big_l() + 1.0) * wshape_sqrt_eps();
  CHECK(wshape_w1(vertex) == 0.0);
  CHECK(wshape_w2(vertex) == doctest::Approx(0.2));
  const MinimaxProblem mm = make_wshape();
  const std::vector<double> h = mm.truth.hess_phi(DenseVector{0.0, 0.0, 0.0});
  CHECK(h[0] == doctest::Approx(1.0 / 20.0));
  CHECK(h[4] == doctest::Approx(1.0 / 10.0));
  CHECK(h[8] == -0.2);
  CHECK(mm.truth.phi(DenseVector{0.0, 0.0, vertex}) == doctest::Approx(*mm.truth.phi_star));
}

TEST_CASE("zero-chain instances") {
  SUBCASE("smooth variant") {
    const BilevelProblem p = make_zero_chain(ZeroChainVariant::smooth, 10);
    CHECK(p.d_y == 20);
    const DenseVector x{0.0};
    const DenseVector y0 = DenseVector::zeros(20);
    CHECK(p.f_val(x, y0) == 0.0);
    CHECK(p.truth.phi(x) == doctest::Approx(0.25));
    const DenseVector g0 = p.grad_g_y(x, y0);
    const double sigma = 1.0 / std::sqrt(20.0);
    CHECK(g0[0] == doctest::Approx(-sigma / 4.0));
    for (std::size_t j = 1; j < 20; ++j) CHECK(g0[j] == 0.0);
    // The declared minimizer is a stationary point with the optimal value.
    const DenseVector ys = p.truth.y_star(x);
    CHECK(p.grad_g_y(x, ys).norm() <= 1e-14);
    CHECK(p.g_val(x, ys) == doctest::Approx(p.truth.g_star(x)));
    CHECK(p.f_val(x, ys) == doctest::Approx(0.25));
  }
  SUBCASE("lipschitz variant") {
    const BilevelProblem p = make_zero_chain(ZeroChainVariant::lipschitz, 10);
    const DenseVector x{0.0};
    const DenseVector ys = p.truth.y_star(x);
    CHECK(p.g_val(x, ys) == doctest::Approx(p.truth.g_star(x)));
    CHECK(p.f_val(x, ys) == doctest::Approx(0.25));
    CHECK(p.truth.phi(x) == doctest::Approx(0.25));
    // Subgradient selection at the origin touches only the first coordinate.
    const DenseVector g0 = p.grad_g_y(x, DenseVector::zeros(20));
    for (std::size_t j = 1; j < 20; ++j) CHECK(g0[j] == 0.0);
    CHECK(g0[0] > 0.0);
  }
}

TEST_CASE("sharp instances pinned values") {
  SUBCASE("gradient-dominated box instance") {
    const BilevelProblem p = make_pl_remark2();
    CHECK(p.truth.phi(DenseVector{1.0}) == 0.0);
    const DenseVector ys = p.truth.y_star(DenseVector{1.0});
    CHECK(ys[0] == 1.0);  // the LL solution set at x = 1 pins y1 = 1
    CHECK(p.f_val(DenseVector{1.0}, DenseVector{1.0, 1.0}) == 0.0);
    CHECK(p.constants.ell == 2.0);
    CHECK(p.constants.sharp_mod == 2.0);
  }
  SUBCASE("discontinuous instance") {
    const BilevelProblem p = make_ex41();
    CHECK(p.truth.phi(DenseVector{0.5}) == doctest::Approx(1.25));
    CHECK(p.truth.phi(DenseVector{-0.5}) == doctest::Approx(-0.75));
  }
  SUBCASE("nonsmooth instance") {
    const BilevelProblem p = make_ex51();
    CHECK(p.truth.phi(DenseVector{0.4}) == doctest::Approx(-0.4));
    CHECK(p.truth.grad_phi(DenseVector{0.4})[0] == -1.0);
    // The sampled-hull gap certifies the kink: 0 is in the hull around 0.
    Rng rng(3);
    CHECK(goldstein_gap(p.truth, DenseVector{0.0}, 0.1, 32, rng) <= 1e-6);
  }
}

TEST_CASE("regularization failure demo pins both proof cases") {
  const RegularizationDemo nz = regularization_failure_demo(0.5, 1.0);
  CHECK(nz.case_name == "pivot_nonzero");
  for (std::size_t i = 0; i < nz.grid.size(); ++i) {
    CHECK(nz.phi[i] == doctest::Approx(-nz.grid[i] * nz.grid[i]));
    CHECK(nz.phi_reg[i] == doctest::Approx(1.0 - 2.0 * nz.grid[i]));
  }
  const RegularizationDemo z = regularization_failure_demo(0.5, 0.0);
  CHECK(z.case_name == "pivot_zero");
  for (std::size_t i = 0; i < z.grid.size(); ++i)
    CHECK(z.phi_reg[i] == doctest::Approx(1.0 - 2.0 * z.grid[i]));
  CHECK_THROWS_AS(regularization_failure_demo(0.0), ContractViolation);
}

TEST_CASE("adversarial least squares declares the published moduli") {
  Rng rng(8);
  const BilevelProblem p = make_adv_least_squares(30, 5, 2.0, rng, 1e-3, 1.0);
  CHECK(p.constants.ell == doctest::Approx(3.0 * 1.0));        // (lam+1) sigma_max
  CHECK(p.constants.sharp_mod == doctest::Approx(3.0 * 1e-3));  // (lam+1) sigma_min+
  // The closed-form LL solution is feasible and optimal for g.
  const DenseVector x = sample_ball(rng, 5, 1.0);
  const DenseVector ys = p.truth.y_star(x);
  CHECK(p.g_val(x, ys) == doctest::Approx(p.truth.g_star(x)));
  // Random feasible points cannot beat it.
  for (int i = 0; i < 10; ++i) {
    DenseVector y = ys;
    y.axpy_in(1.0, sample_ball(rng, 30, 0.5));
    CHECK(p.g_val(x, y) >= p.truth.g_star(x) - 1e-10);
  }
  CHECK(p.truth.phi(x) == doctest::Approx(p.f_val(x, ys)));
}

TEST_CASE("bundled projections are idempotent") {
  Rng rng(17);
  for (const char* id : {"pl-remark2", "ex41", "ex51", "zerochain-smooth"}) {
    const BuiltProblem built = build_problem(id, {}, 1);
    const BilevelProblem& p = *built.blo;
    if (!p.project_y) continue;
    for (int i = 0; i < 50; ++i) {
      const DenseVector v = sample_ball(rng, p.d_y, 5.0);
      const DenseVector once = p.project_y(v);
      CHECK(p.project_y(once) == once);
    }
  }
  Rng prng(2);
  const BilevelProblem advls = make_adv_least_squares(20, 4, 1.0, prng);
  for (int i = 0; i < 20; ++i) {
    const DenseVector v = sample_ball(prng, advls.d_y, 100.0);
    const DenseVector once = advls.project_y(v);
    CHECK((advls.project_y(once) - once).norm() <= 1e-12);
  }
}

TEST_CASE("problem registry resolves every advertised id") {
  for (const auto& info : problem_registry()) {
    CHECK(is_known_problem(info.id));
    const BuiltProblem built = build_problem(info.id, {}, 3);
    CHECK((built.blo.has_value() || built.minimax.has_value() || built.demo_only));
  }
  CHECK_FALSE(is_known_problem("nope"));
  CHECK_THROWS_AS(build_problem("nope", {}, 0), ContractViolation);
}
