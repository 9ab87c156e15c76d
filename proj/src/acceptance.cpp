#include "bilevel/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "bilevel/diagnostics.hpp"
#include "bilevel/igfm.hpp"
#include "bilevel/problems.hpp"
#include "bilevel/raf2ba.hpp"
#include "bilevel/sgm.hpp"

namespace bilevel {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Accelerated-descent rate law on random strongly convex quadratics.
// The theoretical contraction underflows double precision for mild condition
// numbers and large T, so the check carries an explicit rounding floor; a
// genuine constant-factor violation clears it by many orders of magnitude.
// ---------------------------------------------------------------------------
CriterionResult crit_agd_rate() {
  CriterionResult r{"agd-rate", true, "", 0.0};
  Rng rng(2024);
  int violations = 0;
  double worst_margin = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int d = 2 + static_cast<int>(rng.uniform_int(49));
    const double kappa = std::exp(rng.uniform(0.0, std::log(1e3)));
    const auto n = static_cast<std::size_t>(d);
    const Mat u = random_orthogonal(rng, n);
    Mat a(n, n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double eig;
      if (k == 0)
        eig = 1.0;
      else if (k == n - 1)
        eig = kappa;
      else
        eig = rng.uniform(1.0, kappa);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) += eig * u(i, k) * u(j, k);
    }
    DenseVector z_star(n), z0(n);
    for (std::size_t i = 0; i < n; ++i) {
      z_star[i] = rng.uniform(-1.0, 1.0);
      z0[i] = rng.uniform(-1.0, 1.0);
    }
    const DenseVector b = matvec(a, z_star);
    const GradOracle grad = [&a, &b](const DenseVector& z) { return matvec(a, z) - b; };
    AgdParams params = agd_params_for(kappa, 1.0);
    const double dist0 = (z0 - z_star).squared_norm();
    const double floor = std::pow(1e-10 * (1.0 + z_star.norm()), 2);
    for (const std::int64_t T : {1, 10, 100}) {
      params.iters = T;
      const DenseVector zT = agd_run(grad, z0, params);
      const double achieved = (zT - z_star).squared_norm();
      const double bound =
          (1.0 + kappa) * std::pow(1.0 - 1.0 / std::sqrt(kappa), static_cast<double>(T)) *
          dist0;
      if (achieved > bound * (1.0 + 1e-9) + floor) {
        ++violations;
        worst_margin = std::max(worst_margin, achieved - bound);
      }
    }
  }
  r.pass = violations == 0;
  r.detail = "violations=" + std::to_string(violations) +
             (violations ? " worst_excess=" + fmt(worst_margin) : "");
  return r;
}

// ---------------------------------------------------------------------------
// 2. Hypergradient ground truth vs central differences of the value route.
// ---------------------------------------------------------------------------
CriterionResult crit_hypergradient() {
  CriterionResult r{"hypergradient", true, "", 0.0};
  Rng rng(7);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const int dx = 1 + static_cast<int>(rng.uniform_int(8));
    const int dy = 1 + static_cast<int>(rng.uniform_int(8));
    const double cond = rng.uniform(1.0, 50.0);
    const QuadraticBlo qb = make_quadratic(dx, dy, rng, cond);
    const auto phi = [&qb](const DenseVector& x) { return qb.phi(x); };
    for (int probe = 0; probe < 50; ++probe) {
      DenseVector x = sample_ball(rng, dx, 2.0);
      const DenseVector ga = qb.grad_phi(x);
      const DenseVector gf = fd_gradient(phi, x);
      worst = std::max(worst, (ga - gf).norm() / (1.0 + ga.norm()));
    }
  }
  r.pass = worst <= 1e-6;
  r.detail = "worst_rel_err=" + fmt(worst);
  return r;
}

// ---------------------------------------------------------------------------
// 3. Penalty-gap laws: value and gradient distance between the penalized
// value function and the hyper-objective, against the closed-form bounds.
// ---------------------------------------------------------------------------
CriterionResult crit_gap_laws() {
  CriterionResult r{"gap-laws", true, "", 0.0};
  Rng rng(99);
  int violations = 0;
  double tightest = 1e300;
  for (int inst = 0; inst < 5; ++inst) {
    const QuadraticBlo qb = make_quadratic(4, 6, rng, 5.0 + 3.0 * inst);
    const SmoothnessConstants& c = qb.constants();
    const double kappa = c.kappa();
    for (const double mult : {2.0, 10.0, 100.0}) {
      const double lambda = mult * kappa;
      const LambdaConstants lc = lambda_constants(c, lambda);
      for (int probe = 0; probe < 100; ++probe) {
        DenseVector x = sample_ball(rng, qb.d_x(), 2.0);
        const double value_gap = std::abs(qb.lstar(x, lambda) - qb.phi(x));
        const double grad_gap = (qb.grad_lstar(x, lambda) - qb.grad_phi(x)).norm();
        if (value_gap > lc.d0 / lambda + 1e-12) ++violations;
        if (grad_gap > lc.d1 / lambda + 1e-12) ++violations;
        tightest = std::min(tightest, lc.d0 / lambda - value_gap);
      }
    }
  }
  r.pass = violations == 0;
  r.detail = "violations=" + std::to_string(violations) + " min_slack=" + fmt(tightest);
  return r;
}

// ---------------------------------------------------------------------------
// 4 + 5. FOSP run on the canonical quadratic instance, with the inner-solve
// tolerance conditions checked against the closed-form inner solutions at
// every iteration. One run serves both criteria.
// ---------------------------------------------------------------------------
struct FospRunOutcome {
  bool fosp_pass = false;
  std::string fosp_detail;
  bool cond_pass = false;
  std::string cond_detail;
};

const FospRunOutcome& fosp_run_once() {
  static const FospRunOutcome outcome = [] {
    FospRunOutcome out;
    const QuadraticBlo qb = make_quadratic_unit(5);
    BilevelProblem p = qb.as_problem("quadratic-unit");
    const double eps = 1e-2;
    DenseVector x0(5, 1.0);
    const double delta_gap = qb.phi(x0) - *p.truth.phi_star;
    const Raf2baParams params = fosp_schedule(p.constants, eps, delta_gap);
    const double lambda = params.lambda;
    const double y_tol = params.sigma / (2.0 * (1.0 + lambda) * p.constants.ell);
    const double z_tol = params.sigma / (2.0 * p.constants.ell);

    int cond_violations = 0;
    int grad_est_violations = 0;
    double worst_y = 0.0, worst_z = 0.0, worst_u = 0.0;
    std::uint64_t checked = 0;
    const RafObserver obs = [&](const RafIterInfo& info) {
      const DenseVector& w = info.w;  // for k = -1 rows this is the epoch start
      const double y_err = (info.y - qb.y_star_penalized(w, lambda)).norm();
      const double z_err = (info.z - qb.y_star(w)).norm();
      worst_y = std::max(worst_y, y_err / y_tol);
      worst_z = std::max(worst_z, z_err / z_tol);
      if (y_err > y_tol * (1.0 + 1e-9) + 1e-13) ++cond_violations;
      if (z_err > z_tol * (1.0 + 1e-9) + 1e-13) ++cond_violations;
      if (info.k >= 0) {
        const double u_err = (info.u - qb.grad_lstar(w, lambda)).norm();
        worst_u = std::max(worst_u, u_err);
        if (u_err > params.sigma * (1.0 + 1e-9) + 1e-13) ++grad_est_violations;
      }
      ++checked;
    };

    Rng rng(7);
    const Raf2baResult res = raf2ba_run(p, x0, params, rng, 200000, obs);
    const double grad_norm = qb.grad_phi(res.x_hat).norm();
    const double bound = 83.0 * eps + params.lc.d1 / lambda;
    const bool counters_ok = res.counter.jv_g == 0 && res.counter.hv_g == 0;
    out.fosp_pass =
        res.status == RunStatus::ok && grad_norm <= bound && counters_ok;
    out.fosp_detail = "grad_norm=" + fmt(grad_norm) + " bound=" + fmt(bound) +
                      " jv=" + std::to_string(res.counter.jv_g) +
                      " hv=" + std::to_string(res.counter.hv_g) +
                      " status=" + run_status_name(res.status);
    out.cond_pass = cond_violations == 0 && grad_est_violations == 0 && checked > 0;
    out.cond_detail = "inner_solves_checked=" + std::to_string(checked) +
                      " violations=" + std::to_string(cond_violations) +
                      " grad_est_violations=" + std::to_string(grad_est_violations) +
                      " worst_y_frac=" + fmt(worst_y) + " worst_z_frac=" + fmt(worst_z);
    return out;
  }();
  return outcome;
}

CriterionResult crit_raf2ba_fosp() {
  const FospRunOutcome& o = fosp_run_once();
  return {"raf2ba-fosp", o.fosp_pass, o.fosp_detail, 0.0};
}

CriterionResult crit_condition1() {
  const FospRunOutcome& o = fosp_run_once();
  return {"condition1", o.cond_pass, o.cond_detail, 0.0};
}

// ---------------------------------------------------------------------------
// 6. Minimax equivalence: the bilevel solver on the f/-f image of the
// W-shaped instance reproduces the descent-ascent solver iterate-for-iterate
// under matched settings and seed.
// ---------------------------------------------------------------------------
PragdaParams wshape_hand_params() {
  // Hand-tuned configuration for the W-shaped experiments (the analysis-driven
  // schedule's restart budget at this accuracy collapses the step size; the
  // original experiment grid-searched these).
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
  p.chat_coeff = 0.0;
  p.t_init = 40;
  p.t_step = 4;
  return p;
}

Raf2baParams raf2ba_params_matching(const PragdaParams& q, double lambda) {
  Raf2baParams p;
  p.eta = q.eta;
  p.theta = q.theta;
  p.big_k = q.big_k;
  p.big_b = q.big_b;
  p.lambda = lambda;
  p.sigma = q.sigma;
  p.perturbation = true;
  p.pert_radius = q.pert_radius;
  p.agd_g = q.agd;
  p.agd_fg = q.agd;  // matched inner solvers
  p.eps = q.eps;
  p.rho_eff = q.rho_used;
  p.chat_coeff = q.chat_coeff;
  p.t_g_init = q.t_init;
  p.t_g_step = q.t_step;
  p.t_fg_init = q.t_init;
  p.t_fg_step = q.t_step;
  return p;
}

CriterionResult crit_equivalence() {
  CriterionResult r{"equivalence", true, "", 0.0};
  const MinimaxProblem mm = make_wshape();
  const BilevelProblem blo = as_bilevel(mm);
  PragdaParams pq = wshape_hand_params();
  pq.big_k = 400;
  const Raf2baParams pr = raf2ba_params_matching(pq, 2.0);
  const DenseVector x0{0.0, 0.0, 1.0};
  const std::uint64_t budget = 3000;

  std::vector<DenseVector> xs_pragda, xs_raf;
  bool yz_equal = true;
  const PragdaObserver obs_p = [&xs_pragda](const PragdaIterInfo& info) {
    xs_pragda.push_back(info.x_next);
  };
  const RafObserver obs_r = [&xs_raf, &yz_equal](const RafIterInfo& info) {
    if (info.k < 0) {
      if (!(info.y == info.z)) yz_equal = false;
      return;
    }
    if (!(info.y == info.z)) yz_equal = false;
    xs_raf.push_back(info.x_next);
  };

  Rng rng_p(42), rng_r(42);
  const PragdaResult res_p = pragda_run(mm, x0, pq, rng_p, budget, obs_p);
  const Raf2baResult res_r = raf2ba_run(blo, x0, pr, rng_r, budget, obs_r);

  double worst = 0.0;
  const bool same_len = xs_pragda.size() == xs_raf.size();
  if (same_len) {
    for (std::size_t i = 0; i < xs_pragda.size(); ++i)
      for (std::size_t j = 0; j < xs_pragda[i].size(); ++j)
        worst = std::max(worst, std::abs(xs_pragda[i][j] - xs_raf[i][j]));
    for (std::size_t j = 0; j < res_p.x_hat.size(); ++j)
      worst = std::max(worst, std::abs(res_p.x_hat[j] - res_r.x_hat[j]));
  }
  r.pass = same_len && yz_equal && worst <= 1e-12;
  r.detail = "iters=" + std::to_string(xs_pragda.size()) +
             (same_len ? "" : " (length mismatch " + std::to_string(xs_raf.size()) + ")") +
             " worst_coord_diff=" + fmt(worst) + " yz_equal=" + (yz_equal ? "yes" : "no");
  return r;
}

// ---------------------------------------------------------------------------
// 7. Saddle escape on the W-shaped instance: the perturbed restarted solver
// leaves the strict saddle and settles at a second-order point, while the
// plain descent-ascent loop with the same oracle budget stays put.
// ---------------------------------------------------------------------------
CriterionResult crit_saddle_escape() {
  CriterionResult r{"saddle-escape", false, "", 0.0};
  const MinimaxProblem mm = make_wshape();
  const DenseVector x0{1e-3, 1e-3, 1e-16};
  const PragdaParams params = wshape_hand_params();

  bool any_pass = false;
  std::string detail;
  std::uint64_t budget_used = 0;
  for (std::uint64_t seed = 1; seed <= 5 && !any_pass; ++seed) {
    Rng rng(seed);
    const PragdaResult res = pragda_run(mm, x0, params, rng, 30000);
    const auto [ok, rep] = sosp_check(mm.truth, res.x_hat, 1e-3, 0.0);
    const bool pass = rep.grad_norm <= 1e-3 && rep.hess_min_eig.value_or(-1.0) > 0.0 &&
                      res.counter.jv_g == 0 && res.counter.hv_g == 0;
    budget_used = res.counter.gc_f;
    detail = "seed=" + std::to_string(seed) + " grad=" + fmt(rep.grad_norm) +
             " min_eig=" + fmt(rep.hess_min_eig.value_or(-1.0)) +
             " oracles=" + std::to_string(budget_used);
    if (pass) any_pass = true;
  }

  // Reference loop with the same oracle budget from the same start.
  const GdaResult gda = gda_reference_loop(mm, x0, DenseVector{0.0, 0.0}, 1.0 / 240.0,
                                           1.0 / 20.0, budget_used);
  const bool gda_stuck = std::abs(gda.x[2]) <= 1e-2;
  r.pass = any_pass && gda_stuck;
  r.detail = detail + " gda_x3=" + fmt(gda.x[2]) + (gda_stuck ? " (stuck)" : " (escaped)");
  return r;
}

// ---------------------------------------------------------------------------
// 8. Chain hardness: span-respecting methods cannot activate coordinates past
// the front, so the UL value stays 1/4 away from the hyper-objective value.
// ---------------------------------------------------------------------------
CriterionResult crit_zero_chain() {
  CriterionResult r{"zero-chain", true, "", 0.0};
  int zero_violations = 0, gap_violations = 0;
  for (const int big_k : {5, 20, 50}) {
    for (const ZeroChainVariant variant :
         {ZeroChainVariant::smooth, ZeroChainVariant::lipschitz}) {
      const BilevelProblem p = make_zero_chain(variant, big_k);
      const int q = p.d_y;
      const DenseVector x{0.0};
      const DenseVector y0 = DenseVector::zeros(static_cast<std::size_t>(q));
      const GradOracle grad_g = [&p, &x](const DenseVector& y) {
        return p.grad_g_y(x, y);
      };
      // Accelerated method.
      AgdParams agd;
      agd.step_alpha = 1.0;
      agd.momentum_beta = 0.5;
      for (int k = 1; k <= big_k; ++k) {
        agd.iters = k;
        const DenseVector yk = agd_run(grad_g, y0, agd);
        for (int j = k; j < q; ++j)
          if (yk[static_cast<std::size_t>(j)] != 0.0) ++zero_violations;
        if (std::abs(p.f_val(x, yk) - p.truth.phi(x)) < 0.25 - 1e-12) ++gap_violations;
      }
      // Plain subgradient descent.
      DenseVector y = y0;
      for (int k = 1; k <= big_k; ++k) {
        y = sub_scaled(y, 0.1, p.grad_g_y(x, y));
        for (int j = k; j < q; ++j)
          if (y[static_cast<std::size_t>(j)] != 0.0) ++zero_violations;
        if (std::abs(p.f_val(x, y) - p.truth.phi(x)) < 0.25 - 1e-12) ++gap_violations;
      }
    }
  }
  r.pass = zero_violations == 0 && gap_violations == 0;
  r.detail = "support_leaks=" + std::to_string(zero_violations) +
             " gap_violations=" + std::to_string(gap_violations);
  return r;
}

// ---------------------------------------------------------------------------
// 9. Switching-gradient contract on the weak-sharp |y| instance and the
// gradient-dominated box instance.
// ---------------------------------------------------------------------------
BilevelProblem make_abs_instance() {
  BilevelProblem p;
  p.name = "weak-sharp-abs";
  p.d_x = 1;
  p.d_y = 1;
  p.f_val = [](const DenseVector&, const DenseVector& y) { return y[0]; };
  p.grad_f_x = [](const DenseVector&, const DenseVector&) { return DenseVector{0.0}; };
  p.grad_f_y = [](const DenseVector&, const DenseVector&) { return DenseVector{1.0}; };
  p.g_val = [](const DenseVector&, const DenseVector& y) { return std::abs(y[0]); };
  p.grad_g_x = [](const DenseVector&, const DenseVector&) { return DenseVector{0.0}; };
  // Deterministic subgradient selection: 0 at the kink.
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
  t.y_star = [](const DenseVector&) { return DenseVector{0.0}; };
  p.truth = std::move(t);
  return p;
}

CriterionResult crit_sgm_contract() {
  CriterionResult r{"sgm-contract", true, "", 0.0};
  std::ostringstream detail;
  bool all_ok = true;
  const BilevelProblem abs_p = make_abs_instance();
  const BilevelProblem pl_p = make_pl_remark2();
  for (const double zeta : {0.1, 0.01}) {
    {
      OracleCounter counter;
      const SgmParams params = sgm_schedule(abs_p.constants, zeta);
      const SgmResult res =
          sgm_run(abs_p, DenseVector{0.0}, DenseVector{1.0}, params, counter);
      const auto [ok, rep] = ll_optimality_check(abs_p, DenseVector{0.0}, res.y_out, zeta, zeta);
      const double slack = abs_p.g_val(DenseVector{0.0}, res.y_out) - res.g_hat_star;
      const bool slack_ok = slack <= 4.0 * params.sgm_threshold + 1e-12;
      all_ok = all_ok && ok && slack_ok && counter.jv_g == 0 && counter.hv_g == 0;
      detail << "abs(zeta=" << zeta << "): f_gap=" << fmt(*rep.ll_value_gap)
             << " g_gap=" << fmt(*rep.ll_feas_gap) << (ok && slack_ok ? " ok; " : " FAIL; ");
    }
    {
      OracleCounter counter;
      const SgmParams params = sgm_schedule(pl_p.constants, zeta);
      const SgmResult res = sgm_run(pl_p, DenseVector{1.0}, DenseVector{0.95, 0.95},
                                    params, counter);
      const auto [ok, rep] =
          ll_optimality_check(pl_p, DenseVector{1.0}, res.y_out, zeta, zeta);
      all_ok = all_ok && ok && counter.jv_g == 0 && counter.hv_g == 0;
      detail << "pl(zeta=" << zeta << "): f_gap=" << fmt(*rep.ll_value_gap)
             << " g_gap=" << fmt(*rep.ll_feas_gap) << (ok ? " ok; " : " FAIL; ");
    }
  }
  r.pass = all_ok;
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// 10. Gradient-free stationarity: runs on the gradient-dominated instance
// land near the minimizer with a small sampled-hull gap, and the gap
// estimator certifies the nonsmooth -|x| instance near its kink.
// ---------------------------------------------------------------------------
CriterionResult crit_igfm_goldstein() {
  CriterionResult r{"igfm-goldstein", false, "", 0.0};
  const BilevelProblem p = make_pl_remark2();
  const double eps = 0.2, delta = 0.1;
  const DenseVector x0{1.1};
  const double delta_gap = p.truth.phi(x0) - *p.truth.phi_star;
  ScheduleScale scale;
  scale.sub_zeta = 2.0;  // estimator accuracy multiplier; keeps the run desk-scale
  const IgfmParams params = igfm_schedule(p.constants, eps, delta, delta_gap, 1, scale);

  bool any_pass = false;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5 && !any_pass; ++seed) {
    Rng rng(seed);
    OracleCounter counter;
    const IgfmResult res = igfm_run(p, x0, DenseVector{0.95, 0.95}, params, rng, counter);
    Rng gap_rng(seed + 100);
    const double gap = goldstein_gap(p.truth, res.x_out, delta, 64, gap_rng);
    const double dist = std::abs(res.x_out[0] - 1.0);
    const bool pass = gap <= eps && dist <= 0.2 && counter.jv_g == 0 && counter.hv_g == 0;
    detail = "seed=" + std::to_string(seed) + " x_out=" + fmt(res.x_out[0]) +
             " gap=" + fmt(gap) + " dist=" + fmt(dist);
    if (pass) any_pass = true;
  }

  // Kink certificate on the nonsmooth instance.
  const BilevelProblem ex = make_ex51();
  bool kink_ok = true;
  double worst_kink = 0.0;
  Rng rng(5);
  for (const double x : {0.0, 0.05, -0.07}) {
    const double gap = goldstein_gap(ex.truth, DenseVector{x}, 0.1, 64, rng);
    worst_kink = std::max(worst_kink, gap);
    if (gap > 1e-6) kink_ok = false;
  }
  r.pass = any_pass && kink_ok;
  r.detail = detail + " kink_gap_max=" + fmt(worst_kink);
  return r;
}

// ---------------------------------------------------------------------------
// 11. Two-point estimator unbiasedness against the ball-smoothed gradient.
// ---------------------------------------------------------------------------
CriterionResult crit_unbiasedness() {
  CriterionResult r{"unbiasedness", true, "", 0.0};
  const int d = 3;
  const double delta = 0.2;
  const DenseVector x{0.4, -0.3, 0.8};

  // E[exp(s*v1)] for v uniform in the unit ball of R^3 (marginal density
  // (3/4)(1-t^2)); composite Simpson as the independent quadrature oracle.
  const auto smooth_exp_factor = [](double s) {
    const int n = 20000;
    const double h = 2.0 / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double t = -1.0 + i * h;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * std::exp(s * t) * 0.75 * (1.0 - t * t);
    }
    return acc * h / 3.0;
  };

  struct Case {
    std::function<double(const DenseVector&)> phi;
    DenseVector grad_smoothed;
  };
  std::vector<Case> cases;
  const DenseVector c_lin{1.0, -2.0, 0.5};
  cases.push_back({[c_lin](const DenseVector& v) { return c_lin.dot(v); }, c_lin});
  cases.push_back({[](const DenseVector&) { return 3.0; }, DenseVector{0.0, 0.0, 0.0}});
  cases.push_back({[](const DenseVector& v) { return 0.5 * v.squared_norm(); }, x});
  Mat a(3, 3, 0.0);
  a(0, 0) = 2.0; a(1, 1) = 0.5; a(2, 2) = 1.5;
  a(0, 1) = a(1, 0) = 0.3; a(1, 2) = a(2, 1) = -0.4;
  const DenseVector b{0.2, 0.1, -0.5};
  cases.push_back(
      {[a, b](const DenseVector& v) { return 0.5 * v.dot(matvec(a, v)) + b.dot(v); },
       matvec(a, x) + b});
  const double aa = 1.3;
  DenseVector g_exp{aa * std::exp(aa * x[0]) * smooth_exp_factor(aa * delta), 0.0, 0.0};
  cases.push_back({[aa](const DenseVector& v) { return std::exp(aa * v[0]); }, g_exp});

  Rng rng(31);
  bool all_ok = true;
  double worst_sigmas = 0.0;
  const int n_samples = 100000;
  for (const Case& cs : cases) {
    DenseVector mean(static_cast<std::size_t>(d), 0.0);
    DenseVector m2(static_cast<std::size_t>(d), 0.0);
    OracleCounter counter;
    for (int i = 0; i < n_samples; ++i) {
      const DenseVector u = sample_unit_sphere(rng, d);
      const DenseVector est = two_point_estimate(cs.phi, x, u, delta, d, counter);
      for (std::size_t j = 0; j < mean.size(); ++j) {
        const double prev = mean[j];
        mean[j] += (est[j] - prev) / static_cast<double>(i + 1);
        m2[j] += (est[j] - prev) * (est[j] - mean[j]);
      }
    }
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double se = std::sqrt(m2[j] / (n_samples - 1.0) / n_samples);
      const double dev = std::abs(mean[j] - cs.grad_smoothed[j]);
      const double sigmas = dev / std::max(se, 1e-14);
      worst_sigmas = std::max(worst_sigmas, se == 0.0 && dev == 0.0 ? 0.0 : sigmas);
      if (dev > 3.0 * se + 1e-12) all_ok = false;
    }
  }
  r.pass = all_ok;
  r.detail = "worst_sigmas=" + fmt(worst_sigmas);
  return r;
}

// ---------------------------------------------------------------------------
// 12. Determinism and counter fidelity.
// ---------------------------------------------------------------------------
CriterionResult crit_determinism() {
  CriterionResult r{"determinism", true, "", 0.0};
  std::ostringstream detail;
  bool ok = true;

  // Identical seeds produce identical traces and outputs (wall clocks aside).
  const QuadraticBlo qb = make_quadratic_unit(4);
  const BilevelProblem p = qb.as_problem();
  const Raf2baParams params = fosp_schedule(p.constants, 5e-2, 1.0);
  const DenseVector x0(4, 1.0);
  Rng r1(123), r2(123);
  const Raf2baResult a = raf2ba_run(p, x0, params, r1, 50000);
  const Raf2baResult b = raf2ba_run(p, x0, params, r2, 50000);
  const bool same = semantically_equal(a.trace, b.trace) && a.x_hat == b.x_hat &&
                    a.counter == b.counter;
  ok = ok && same;
  detail << "raf2ba_repeat=" << (same ? "identical" : "DIFFERS") << "; ";

  // Perturbed minimax run, same exercise.
  const MinimaxProblem mm = make_wshape();
  PragdaParams pp = wshape_hand_params();
  pp.big_k = 200;
  Rng r3(9), r4(9);
  const PragdaResult pa = pragda_run(mm, DenseVector{0.1, 0.1, 0.3}, pp, r3, 4000);
  const PragdaResult pb = pragda_run(mm, DenseVector{0.1, 0.1, 0.3}, pp, r4, 4000);
  const bool same_p = semantically_equal(pa.trace, pb.trace) && pa.x_hat == pb.x_hat;
  ok = ok && same_p;
  detail << "pragda_repeat=" << (same_p ? "identical" : "DIFFERS") << "; ";

  // Counter fields equal independent tallies taken inside the closures.
  struct Tally {
    std::uint64_t gfx = 0, gfy = 0, ggx = 0, ggy = 0, vf = 0, vg = 0;
  };
  auto tally = std::make_shared<Tally>();
  BilevelProblem wrapped = p;
  wrapped.f_val = [inner = p.f_val, tally](const DenseVector& x, const DenseVector& y) {
    ++tally->vf;
    return inner(x, y);
  };
  wrapped.g_val = [inner = p.g_val, tally](const DenseVector& x, const DenseVector& y) {
    ++tally->vg;
    return inner(x, y);
  };
  wrapped.grad_f_x = [inner = p.grad_f_x, tally](const DenseVector& x, const DenseVector& y) {
    ++tally->gfx;
    return inner(x, y);
  };
  wrapped.grad_f_y = [inner = p.grad_f_y, tally](const DenseVector& x, const DenseVector& y) {
    ++tally->gfy;
    return inner(x, y);
  };
  wrapped.grad_g_x = [inner = p.grad_g_x, tally](const DenseVector& x, const DenseVector& y) {
    ++tally->ggx;
    return inner(x, y);
  };
  wrapped.grad_g_y = [inner = p.grad_g_y, tally](const DenseVector& x, const DenseVector& y) {
    ++tally->ggy;
    return inner(x, y);
  };
  Rng r5(123);
  const Raf2baResult c = raf2ba_run(wrapped, x0, params, r5, 50000);
  const bool counts_ok = c.counter.gc_f == tally->gfx + tally->gfy &&
                         c.counter.gc_g == tally->ggx + tally->ggy &&
                         c.counter.val_f == tally->vf && c.counter.val_g == tally->vg &&
                         c.counter.jv_g == 0 && c.counter.hv_g == 0;
  ok = ok && counts_ok;
  detail << "instrumented_counts=" << (counts_ok ? "match" : "MISMATCH");

  r.pass = ok;
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// 13. W-shape construction: branch gluing and the exact saddle curvature.
// ---------------------------------------------------------------------------
CriterionResult crit_wshape_c1() {
  CriterionResult r{"wshape-c1", true, "", 0.0};
  const double s = wshape_sqrt_eps();
  const double big_l = wshape_big_l();
  double worst = 0.0;
  for (const double b : {-big_l * s, -s, s, big_l * s}) {
    const double b_right = std::nextafter(b, 1e300);
    worst = std::max(worst, std::abs(wshape_w(b) - wshape_w(b_right)));
    worst = std::max(worst, std::abs(wshape_w1(b) - wshape_w1(b_right)));
  }
  const MinimaxProblem mm = make_wshape();
  const std::vector<double> h = mm.truth.hess_phi(DenseVector{0.0, 0.0, 0.0});
  const bool exact_curvature = wshape_w2(0.0) == -0.2 && h[8] == -0.2;
  r.pass = worst <= 1e-12 && exact_curvature;
  r.detail = "worst_glue_err=" + fmt(worst) +
             " saddle_curvature=" + fmt(h[8]) + (exact_curvature ? " (exact)" : " (NOT exact)");
  return r;
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> criteria = {
      {"agd-rate", "accelerated-descent rate law on 100 random quadratics", crit_agd_rate},
      {"hypergradient", "closed-form hypergradient vs central differences", crit_hypergradient},
      {"gap-laws", "penalty value/gradient gap bounds on the quadratic family", crit_gap_laws},
      {"raf2ba-fosp", "first-order stationarity on the canonical quadratic", crit_raf2ba_fosp},
      {"condition1", "inner-solve tolerance conditions during the FOSP run", crit_condition1},
      {"equivalence", "bilevel image reproduces descent-ascent iterates", crit_equivalence},
      {"saddle-escape", "perturbed solver escapes the W-shape saddle; plain loop stays", crit_saddle_escape},
      {"zero-chain", "chain instances keep untouched coordinates at zero", crit_zero_chain},
      {"sgm-contract", "switching-gradient accuracy contract", crit_sgm_contract},
      {"igfm-goldstein", "gradient-free stationarity and kink certificate", crit_igfm_goldstein},
      {"unbiasedness", "two-point estimator matches the smoothed gradient", crit_unbiasedness},
      {"determinism", "seeded repeatability and counter fidelity", crit_determinism},
      {"wshape-c1", "piecewise construction gluing and exact saddle curvature", crit_wshape_c1},
  };
  return criteria;
}

std::vector<CriterionResult> run_acceptance(const std::string& filter) {
  std::vector<CriterionResult> results;
  for (const Criterion& c : acceptance_criteria()) {
    if (!filter.empty() && c.id.find(filter) == std::string::npos) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = c.run();
    } catch (const std::exception& e) {
      res.id = c.id;
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace bilevel
