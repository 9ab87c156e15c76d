#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bilevel/diagnostics.hpp"
#include "bilevel/problems.hpp"

using namespace bilevel;

TEST_CASE("first-order check") {
  const QuadraticBlo qb = make_quadratic_unit(3);
  const BilevelProblem p = qb.as_problem();
  const auto [ok, rep] = fosp_check(p.truth, *p.truth.x_star, 1e-10);
  CHECK(ok);
  CHECK(rep.grad_norm <= 1e-10);

  const MinimaxProblem mm = make_wshape();
  const double vertex = (wshape_big_l() + 1.0) * wshape_sqrt_eps();
  const auto [ok2, rep2] = fosp_check(mm.truth, DenseVector{0.0, 0.0, vertex}, 1e-12);
  CHECK(ok2);
  CHECK(rep2.grad_norm == 0.0);

  GroundTruth t;
  t.grad_phi = [](const DenseVector&) { return DenseVector{0.3, 0.4}; };
  const auto [ok3, rep3] = fosp_check(t, DenseVector{0.0, 0.0}, 0.49);
  CHECK_FALSE(ok3);
  CHECK(rep3.grad_norm == doctest::Approx(0.5));
}

TEST_CASE("second-order check") {
  const MinimaxProblem mm = make_wshape();
  SUBCASE("the origin fails for thresholds below the saddle curvature") {
    const auto [ok, rep] = sosp_check(mm.truth, DenseVector{0.0, 0.0, 0.0}, 1.0, 0.1);
    CHECK_FALSE(ok);
    CHECK(*rep.hess_min_eig == doctest::Approx(-0.2));
    const auto [ok2, rep2] = sosp_check(mm.truth, DenseVector{0.0, 0.0, 0.0}, 1.0, 0.3);
    CHECK(ok2);
  }
  SUBCASE("the outer vertex passes with a zero threshold") {
    const double vertex = (wshape_big_l() + 1.0) * wshape_sqrt_eps();
    const auto [ok, rep] = sosp_check(mm.truth, DenseVector{0.0, 0.0, vertex}, 1e-9, 0.0);
    CHECK(ok);
    CHECK(*rep.hess_min_eig == doctest::Approx(0.05));
  }
  SUBCASE("convex quadratics pass anywhere the gradient is small") {
    const QuadraticBlo qb = make_quadratic_unit(3);
    const BilevelProblem p = qb.as_problem();
    const auto [ok, rep] = sosp_check(p.truth, *p.truth.x_star, 1e-8, 0.0);
    CHECK(ok);
    CHECK(*rep.hess_min_eig > 0.0);
  }
}

TEST_CASE("finite-difference Hessians match analytic ones") {
  const MinimaxProblem mm = make_wshape();
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const DenseVector x = sample_ball(rng, 3, 1.0);
    const Mat h = fd_hessian(mm.truth.phi, x);
    const std::vector<double> ha = mm.truth.hess_phi(x);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(std::abs(h(r, c) - h(c, r)) <= 1e-8);  // symmetric up to FD noise
        CHECK(h(r, c) == doctest::Approx(ha[r * 3 + c]).epsilon(1e-5).scale(1.0));
      }
  }
}

TEST_CASE("sampled-hull gap estimates") {
  SUBCASE("kink at the center puts zero in the hull") {
    const BilevelProblem p = make_ex51();
    Rng rng(5);
    CHECK(goldstein_gap(p.truth, DenseVector{0.0}, 0.1, 64, rng) <= 1e-6);
  }
  SUBCASE("smooth point with a vanishing ball recovers the gradient norm") {
    const QuadraticBlo qb = make_quadratic_unit(2);
    const BilevelProblem p = qb.as_problem();
    Rng rng(6);
    const DenseVector x{0.7, -0.3};
    const double gap = goldstein_gap(p.truth, x, 0.0, 8, rng);
    CHECK(gap == doctest::Approx(p.truth.grad_phi(x).norm()));
  }
  SUBCASE("kink outside the ball leaves a unit gap") {
    const BilevelProblem p = make_ex51();
    Rng rng(7);
    CHECK(goldstein_gap(p.truth, DenseVector{1.0}, 0.1, 64, rng) ==
          doctest::Approx(1.0));
  }
}

TEST_CASE("min-norm point never beats its own vertices and shrinks on supersets") {
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<DenseVector> pts;
    const int m = 3 + static_cast<int>(rng.uniform_int(12));
    for (int i = 0; i < m; ++i) pts.push_back(sample_ball(rng, 3, 2.0));
    const double gap = min_norm_point(pts).norm();
    for (const DenseVector& v : pts) CHECK(gap <= v.norm() + 1e-10);
    // A superset's hull contains the subset's hull.
    std::vector<DenseVector> more = pts;
    for (int i = 0; i < 4; ++i) more.push_back(sample_ball(rng, 3, 2.0));
    CHECK(min_norm_point(more).norm() <= gap + 1e-8);
  }
}

TEST_CASE("ll-optimality check") {
  const BilevelProblem p = make_pl_remark2();
  const auto [ok, rep] =
      ll_optimality_check(p, DenseVector{1.0}, DenseVector{1.0, 1.0}, 1e-9, 1e-9);
  CHECK(ok);
  CHECK(*rep.ll_value_gap == 0.0);
  const auto [bad, rep2] =
      ll_optimality_check(p, DenseVector{1.0}, DenseVector{0.95, 0.95}, 0.001, 0.1);
  CHECK_FALSE(bad);

  const BilevelProblem zc = make_zero_chain(ZeroChainVariant::smooth, 4);
  const auto [b2, rep3] = ll_optimality_check(
      zc, DenseVector{0.0}, DenseVector::zeros(8), 0.1, 0.1);
  CHECK(*rep3.ll_value_gap == doctest::Approx(0.25));
  CHECK_FALSE(b2);
}

TEST_CASE("report serialization carries stable field names") {
  StationarityReport r;
  r.grad_norm = 0.5;
  r.goldstein_gap = 0.125;
  r.pass = true;
  const std::string js = r.to_json();
  CHECK(js.find("\"grad_norm\":0.5") != std::string::npos);
  CHECK(js.find("\"hess_min_eig\":null") != std::string::npos);
  CHECK(js.find("\"goldstein_gap\":0.125") != std::string::npos);
  CHECK(js.find("\"ll_value_gap\":null") != std::string::npos);
  CHECK(js.find("\"ll_feas_gap\":null") != std::string::npos);
  CHECK(js.find("\"pass\":true") != std::string::npos);
}

TEST_CASE("hausdorff distance on finite sets") {
  const std::vector<DenseVector> a = {DenseVector{0.0}, DenseVector{1.0}};
  const std::vector<DenseVector> b = {DenseVector{0.0}};
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance(a, b) == doctest::Approx(1.0));
  CHECK(hausdorff_distance(b, a) == doctest::Approx(1.0));
}

TEST_CASE("solution-map Lipschitz bound on the gradient-dominated instance") {
  // dist(Y*(x1), Y*(x2)) <= (L/alpha)|x1 - x2| on finite samples of the
  // solution sets; the sets are segments {clamp(x)} x [lo, hi] here, so finite
  // sampling captures them exactly in the pinned y1 coordinate.
  const BilevelProblem p = make_pl_remark2();
  const double ratio_bound = p.constants.ell / p.constants.sharp_mod;
  Rng rng(10);
  for (int i = 0; i < 20; ++i) {
    const double x1 = rng.uniform(0.9, 1.1), x2 = rng.uniform(0.9, 1.1);
    std::vector<DenseVector> s1, s2;
    for (double y2 = 0.95; y2 <= 1.0501; y2 += 0.025) {
      s1.push_back(DenseVector{p.truth.y_star(DenseVector{x1})[0], y2});
      s2.push_back(DenseVector{p.truth.y_star(DenseVector{x2})[0], y2});
    }
    CHECK(hausdorff_distance(s1, s2) <= ratio_bound * std::abs(x1 - x2) + 1e-12);
  }
}

TEST_CASE("plain descent-ascent reference loop stays near the saddle") {
  const MinimaxProblem mm = make_wshape();
  const GdaResult res = gda_reference_loop(mm, DenseVector{1e-3, 1e-3, 1e-16},
                                           DenseVector{0.0, 0.0}, 1.0 / 240.0,
                                           1.0 / 20.0, 20000);
  CHECK(std::abs(res.x[2]) <= 1e-2);
  CHECK(res.grad_queries <= 20000);
}
