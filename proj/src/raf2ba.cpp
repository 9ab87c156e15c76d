#include "bilevel/raf2ba.hpp"

#include <chrono>
#include <cmath>

namespace bilevel {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t ns_since(Clock::time_point t0) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
}

// Output rule: among the late-epoch steps pick the smallest (first index on
// ties), then average w over the prefix up to it.
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

}  // namespace

Raf2baResult raf2ba_run(const BilevelProblem& p, const DenseVector& x0,
                        const Raf2baParams& params, Rng& rng, std::uint64_t budget,
                        const RafObserver& observer) {
  if (p.constants.mu <= 0.0)
    throw ContractViolation("raf2ba_run: lower level must be strongly convex (mu > 0)");
  if (!p.y_unconstrained)
    throw ContractViolation("raf2ba_run: lower level must be unconstrained");
  if (static_cast<int>(x0.size()) != p.d_x)
    throw ContractViolation("raf2ba_run: x0 has wrong dimension");

  const Clock::time_point t_start = Clock::now();
  Raf2baResult res;
  res.counter = OracleCounter{};
  CountedProblem cp(p, res.counter);
  const double lambda = params.lambda;

  // Inner gradient oracles at a fixed UL point.
  const auto grad_g_at = [&cp](const DenseVector& w) {
    return [&cp, &w](const DenseVector& v) { return cp.ggy(w, v); };
  };
  const auto grad_fg_at = [&cp, lambda](const DenseVector& w) {
    return [&cp, &w, lambda](const DenseVector& v) {
      DenseVector g = cp.gfy(w, v);
      g.axpy_in(lambda, cp.ggy(w, v));
      return g;
    };
  };

  // Warm-start norm bounds: user-supplied, else estimated from one long
  // accelerated solve per inner problem at x0 (disclosed in the metadata;
  // the estimation queries are counted like any other).
  AgdParams est_g = params.agd_g;
  AgdParams est_fg = params.agd_fg;
  const double kappa = p.constants.kappa();
  const double kp = params.lc.kappa_prime;
  est_g.iters = static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(kappa) * 28.0));
  est_fg.iters = static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(kp) * 28.0));

  const bool skip_estimation = params.t_g_init && params.t_g_step && params.t_fg_init &&
                               params.t_fg_step;
  double chat_z = 0.0, chat_y = 0.0, delta_lambda = 0.0;
  if (!skip_estimation) {
    const DenseVector zeros_y = DenseVector::zeros(static_cast<std::size_t>(p.d_y));
    DenseVector z_est = agd_run(grad_g_at(x0), zeros_y, est_g);
    DenseVector y_est = agd_run(grad_fg_at(x0), zeros_y, est_fg);
    const double l_hat =
        cp.f(x0, y_est) + lambda * (cp.g(x0, y_est) - cp.g(x0, z_est));
    if (p.truth.phi_star.has_value())
      delta_lambda = std::max(1e-3, l_hat - *p.truth.phi_star + params.lc.d0 / lambda);
    else
      delta_lambda = std::max(1.0, 2.0 * std::abs(l_hat));
    const double growth = delta_lambda * std::sqrt(params.rho_eff) *
                          std::pow(params.eps, -1.5) * params.chat_coeff;
    chat_z = z_est.norm() + kappa * growth;
    chat_y = y_est.norm() + kp * growth;
  }
  if (params.user_chat_z) chat_z = *params.user_chat_z;
  if (params.user_chat_y) chat_y = *params.user_chat_y;

  const SmoothnessConstants& c = p.constants;
  const std::int64_t t_g_init = params.t_g_init.value_or(
      inner_iters_g(c, params.lc, params.sigma, params.big_b, chat_z, -1));
  const std::int64_t t_g_step = params.t_g_step.value_or(
      inner_iters_g(c, params.lc, params.sigma, params.big_b, chat_z, 0));
  const std::int64_t t_fg_init = params.t_fg_init.value_or(
      inner_iters_fg(c, params.lc, params.sigma, params.big_b, chat_y, -1));
  const std::int64_t t_fg_step = params.t_fg_step.value_or(
      inner_iters_fg(c, params.lc, params.sigma, params.big_b, chat_y, 0));

  AgdParams agd_g = params.agd_g, agd_fg = params.agd_fg;
  const std::uint64_t stride = std::max<std::uint64_t>(1, budget / 262144);

  Trace& trace = res.trace;
  trace.set_meta("solver", params.perturbation ? "praf2ba" : "raf2ba");
  trace.set_meta("problem", p.name);
  trace.set_meta("lambda", lambda);
  trace.set_meta("eta", params.eta);
  trace.set_meta("theta", params.theta);
  trace.set_meta("big_k", static_cast<std::uint64_t>(params.big_k));
  trace.set_meta("big_b", params.big_b);
  trace.set_meta("sigma", params.sigma);
  trace.set_meta("pert_radius", params.pert_radius);
  trace.set_meta("chat_z", chat_z);
  trace.set_meta("chat_y", chat_y);
  trace.set_meta("delta_lambda_est", delta_lambda);
  trace.set_meta("t_g_init", static_cast<std::uint64_t>(t_g_init));
  trace.set_meta("t_g_step", static_cast<std::uint64_t>(t_g_step));
  trace.set_meta("t_fg_init", static_cast<std::uint64_t>(t_fg_init));
  trace.set_meta("t_fg_step", static_cast<std::uint64_t>(t_fg_step));
  trace.set_meta("trace_stride", stride);

  const DenseVector zeros_y = DenseVector::zeros(static_cast<std::size_t>(p.d_y));
  DenseVector x_prev = x0;  // x_{t,k-1}
  DenseVector x_cur = x0;   // x_{t,k}

  agd_fg.iters = t_fg_init;
  DenseVector y_warm = agd_run(grad_fg_at(x_cur), zeros_y, agd_fg);
  agd_g.iters = t_g_init;
  DenseVector z_warm = agd_run(grad_g_at(x_cur), zeros_y, agd_g);

  std::int64_t t = 0, k = 0;
  double sum_sq = 0.0;
  std::vector<DenseVector> epoch_ws;
  std::vector<double> epoch_steps;
  epoch_ws.reserve(static_cast<std::size_t>(std::min<std::int64_t>(params.big_k, 1 << 20)));
  std::uint64_t total_iter = 0;
  const DenseVector empty;

  if (observer) {
    RafIterInfo info{t, -1, x_cur, y_warm, z_warm, empty, empty, 0.0};
    observer(info);
  }

  while (k < params.big_k) {
    if (total_iter >= budget) {
      res.status = RunStatus::budget_exhausted;
      break;
    }
    DenseVector w = extrapolate(x_cur, x_prev, 1.0 - params.theta);
    agd_g.iters = t_g_step;
    DenseVector z = agd_run(grad_g_at(w), z_warm, agd_g);
    agd_fg.iters = t_fg_step;
    DenseVector y = agd_run(grad_fg_at(w), y_warm, agd_fg);

    DenseVector u = cp.gfx(w, y);
    DenseVector gap = cp.ggx(w, y) - cp.ggx(w, z);
    u.axpy_in(lambda, gap);
    if (!u.all_finite())
      throw NumericError("raf2ba_run: non-finite UL gradient estimate at w=" + w.str());

    DenseVector x_next = sub_scaled(w, params.eta, u);
    const double step = (x_next - x_cur).norm();
    sum_sq += step * step;
    ++k;
    ++total_iter;
    epoch_steps.push_back(step);
    epoch_ws.push_back(w);

    const double stat = static_cast<double>(k) * sum_sq;
    if (observer) {
      RafIterInfo info{t, k - 1, w, y, z, u, x_next, stat};
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
      trace.rows.push_back(row);
    }

    x_prev = std::move(x_cur);
    x_cur = std::move(x_next);
    y_warm = std::move(y);
    z_warm = std::move(z);

    if (restart_triggered(k, sum_sq, params.big_b)) {
      if (params.perturbation) {
        DenseVector xi = sample_ball(rng, p.d_x, params.pert_radius);
        x_cur = x_cur + xi;
      }
      x_prev = x_cur;
      ++t;
      k = 0;
      sum_sq = 0.0;
      epoch_ws.clear();
      epoch_steps.clear();
      agd_fg.iters = t_fg_init;
      y_warm = agd_run(grad_fg_at(x_cur), zeros_y, agd_fg);
      agd_g.iters = t_g_init;
      z_warm = agd_run(grad_g_at(x_cur), zeros_y, agd_g);
      if (observer) {
        RafIterInfo info{t, -1, x_cur, y_warm, z_warm, empty, empty, 0.0};
        observer(info);
      }
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
