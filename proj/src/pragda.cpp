#include "bilevel/pragda.hpp"

#include <chrono>
#include <cmath>

#include "bilevel/linalg.hpp"

namespace bilevel {

BilevelProblem as_bilevel(const MinimaxProblem& p) {
  BilevelProblem b;
  b.name = p.name + "-blo";
  b.d_x = p.d_x;
  b.d_y = p.d_y;
  b.f_val = p.fbar_val;
  b.grad_f_x = p.grad_fbar_x;
  b.grad_f_y = p.grad_fbar_y;
  b.g_val = [f = p.fbar_val](const DenseVector& x, const DenseVector& y) {
    return -f(x, y);
  };
  b.grad_g_x = [g = p.grad_fbar_x](const DenseVector& x, const DenseVector& y) {
    return -1.0 * g(x, y);
  };
  b.grad_g_y = [g = p.grad_fbar_y](const DenseVector& x, const DenseVector& y) {
    return -1.0 * g(x, y);
  };
  b.project_y = nullptr;
  b.y_unconstrained = true;
  b.constants = p.constants;
  b.truth = p.truth;
  return b;
}

double concavity_violation(const MinimaxProblem& p, Rng& rng, int probes,
                           double x_radius, double y_radius) {
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    DenseVector x = sample_ball(rng, p.d_x, x_radius);
    DenseVector y1 = sample_ball(rng, p.d_y, y_radius);
    DenseVector y2 = sample_ball(rng, p.d_y, y_radius);
    DenseVector mid = 0.5 * (y1 + y2);
    const double lhs = p.fbar_val(x, mid);
    const double rhs = 0.5 * (p.fbar_val(x, y1) + p.fbar_val(x, y2)) +
                       (p.constants.mu / 8.0) * (y1 - y2).squared_norm();
    worst = std::max(worst, rhs - lhs);
  }
  return worst;
}

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t ns_since(Clock::time_point t0) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
}

DenseVector averaged_output(const std::vector<DenseVector>& ws,
                            const std::vector<double>& steps, std::int64_t big_k) {
  const std::int64_t k_hi = static_cast<std::int64_t>(steps.size());
  std::int64_t lo = big_k / 2;
  if (lo >= k_hi) lo = k_hi - 1;
  std::int64_t k0 = lo;
  for (std::int64_t k = lo; k < k_hi; ++k)
    if (steps[static_cast<std::size_t>(k)] < steps[static_cast<std::size_t>(k0)]) k0 = k;
  DenseVector sum(ws.front().size(), 0.0);
  for (std::int64_t k = 0; k <= k0; ++k) sum.axpy_in(1.0, ws[static_cast<std::size_t>(k)]);
  return (1.0 / static_cast<double>(k0 + 1)) * sum;
}

// Counting access to the minimax oracles; gradient queries of either block
// tally as gradient queries of the objective.
struct CountedMinimax {
  const MinimaxProblem* p;
  OracleCounter* c;

  double val(const DenseVector& x, const DenseVector& y) const {
    ++c->val_f;
    const double v = p->fbar_val(x, y);
    if (!std::isfinite(v))
      throw NumericError("pragda: objective returned a non-finite value at x=" + x.str());
    return v;
  }
  DenseVector gx(const DenseVector& x, const DenseVector& y) const {
    ++c->gc_f;
    DenseVector g = p->grad_fbar_x(x, y);
    if (!g.all_finite())
      throw NumericError("pragda: non-finite x-gradient at x=" + x.str() + ", y=" + y.str());
    return g;
  }
  DenseVector gy(const DenseVector& x, const DenseVector& y) const {
    ++c->gc_f;
    DenseVector g = p->grad_fbar_y(x, y);
    if (!g.all_finite())
      throw NumericError("pragda: non-finite y-gradient at x=" + x.str() + ", y=" + y.str());
    return g;
  }
};

}  // namespace

PragdaResult pragda_run(const MinimaxProblem& p, const DenseVector& x0,
                        const PragdaParams& params, Rng& rng, std::uint64_t budget,
                        const PragdaObserver& observer) {
  if (p.constants.mu <= 0.0)
    throw ContractViolation("pragda_run: strong concavity modulus mu must be positive");
  if (static_cast<int>(x0.size()) != p.d_x)
    throw ContractViolation("pragda_run: x0 has wrong dimension");

  const Clock::time_point t_start = Clock::now();
  PragdaResult res;
  CountedMinimax cm{&p, &res.counter};

  // Ascent via descent on the negated objective; the negation is done by the
  // same scale kernel the bilevel image uses, so the two solvers' inner
  // iterates agree bit-for-bit under matched settings.
  const auto grad_neg_at = [&cm](const DenseVector& w) {
    return [&cm, &w](const DenseVector& v) { return -1.0 * cm.gy(w, v); };
  };

  const SmoothnessConstants& c = p.constants;
  const double kappa = c.kappa();

  double chat_y = 0.0, delta_est = 0.0;
  const bool skip_estimation = params.t_init && params.t_step;
  if (!skip_estimation) {
    AgdParams est = params.agd;
    est.iters = static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(kappa) * 28.0));
    DenseVector y_est = agd_run(grad_neg_at(x0),
                                DenseVector::zeros(static_cast<std::size_t>(p.d_y)), est);
    const double phi_hat = cm.val(x0, y_est);
    if (p.truth.phi_star.has_value())
      delta_est = std::max(1e-3, phi_hat - *p.truth.phi_star);
    else
      delta_est = std::max(1.0, 2.0 * std::abs(phi_hat));
    chat_y = y_est.norm() + kappa * delta_est * std::sqrt(params.rho_used) *
                                std::pow(params.eps, -1.5) * params.chat_coeff;
  }
  if (params.user_chat_y) chat_y = *params.user_chat_y;

  // The inner counts follow the same log rule as the bilevel g-solve, with
  // the plain (ell, kappa) moduli of the ascent subproblem.
  LambdaConstants unused{};
  const std::int64_t t_init = params.t_init.value_or(
      inner_iters_g(c, unused, params.sigma, params.big_b, chat_y, -1));
  const std::int64_t t_step = params.t_step.value_or(
      inner_iters_g(c, unused, params.sigma, params.big_b, chat_y, 0));

  const std::uint64_t stride = std::max<std::uint64_t>(1, budget / 262144);
  Trace& trace = res.trace;
  trace.set_meta("solver", "pragda");
  trace.set_meta("problem", p.name);
  trace.set_meta("eta", params.eta);
  trace.set_meta("theta", params.theta);
  trace.set_meta("big_k", static_cast<std::uint64_t>(params.big_k));
  trace.set_meta("big_b", params.big_b);
  trace.set_meta("sigma", params.sigma);
  trace.set_meta("pert_radius", params.pert_radius);
  trace.set_meta("chat_y", chat_y);
  trace.set_meta("t_init", static_cast<std::uint64_t>(t_init));
  trace.set_meta("t_step", static_cast<std::uint64_t>(t_step));
  trace.set_meta("trace_stride", stride);

  const DenseVector zeros_y = DenseVector::zeros(static_cast<std::size_t>(p.d_y));
  AgdParams agd = params.agd;
  DenseVector x_prev = x0, x_cur = x0;
  agd.iters = t_init;
  DenseVector y_warm = agd_run(grad_neg_at(x_cur), zeros_y, agd);

  std::int64_t t = 0, k = 0;
  double sum_sq = 0.0;
  std::vector<DenseVector> epoch_ws;
  std::vector<double> epoch_steps;
  std::uint64_t total_iter = 0;

  while (k < params.big_k) {
    if (total_iter >= budget) {
      res.status = RunStatus::budget_exhausted;
      break;
    }
    DenseVector w = extrapolate(x_cur, x_prev, 1.0 - params.theta);
    agd.iters = t_step;
    DenseVector y = agd_run(grad_neg_at(w), y_warm, agd);
    DenseVector u = cm.gx(w, y);
    DenseVector x_next = sub_scaled(w, params.eta, u);

    const double step = (x_next - x_cur).norm();
    sum_sq += step * step;
    ++k;
    ++total_iter;
    epoch_steps.push_back(step);
    epoch_ws.push_back(w);

    if (observer) {
      PragdaIterInfo info{t, k - 1, w, y, u, x_next,
                          static_cast<double>(k) * sum_sq};
      observer(info);
    }
    if (total_iter % stride == 0) {
      TraceRow row;
      row.iter = total_iter;
      row.epoch = t;
      row.k = k - 1;
      row.step_norm = step;
      row.grad_est_norm = u.norm();
      row.counters = res.counter;
      row.wall_ns = ns_since(t_start);
      // Curvature side channel when the instance knows its Hessian.
      if (p.truth.hess_phi) {
        const std::vector<double> h = p.truth.hess_phi(x_next);
        const std::size_t d = x_next.size();
        Mat hm(d, d);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) hm(i, j) = h[i * d + j];
        row.aux = min_eigenvalue(hm);
      }
      trace.rows.push_back(row);
    }

    x_prev = std::move(x_cur);
    x_cur = std::move(x_next);
    y_warm = std::move(y);

    if (restart_triggered(k, sum_sq, params.big_b)) {
      DenseVector xi = sample_ball(rng, p.d_x, params.pert_radius);
      x_cur = x_cur + xi;
      x_prev = x_cur;
      ++t;
      k = 0;
      sum_sq = 0.0;
      epoch_ws.clear();
      epoch_steps.clear();
      agd.iters = t_init;
      y_warm = agd_run(grad_neg_at(x_cur), zeros_y, agd);
    }
  }

  res.x_hat = epoch_ws.empty() ? x_cur
                               : averaged_output(epoch_ws, epoch_steps, params.big_k);
  trace.set_meta("status", run_status_name(res.status));
  trace.set_meta("epochs", static_cast<std::uint64_t>(t + 1));
  trace.set_meta("total_ul_iters", total_iter);
  return res;
}

}  // namespace bilevel
