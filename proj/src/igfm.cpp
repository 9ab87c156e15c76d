#include "bilevel/igfm.hpp"

#include <chrono>
#include <cmath>

namespace bilevel {

DenseVector two_point_estimate(const ValueEstimator& phi_tilde, const DenseVector& x,
                               const DenseVector& u, double delta, int d_x,
                               OracleCounter& counter) {
  if (delta <= 0.0) throw ContractViolation("two_point_estimate: delta must be positive");
  if (std::abs(u.norm() - 1.0) > 1e-9)
    throw ContractViolation("two_point_estimate: direction must be a unit vector");
  DenseVector plus = x;
  plus.axpy_in(delta, u);
  DenseVector minus = x;
  minus.axpy_in(-delta, u);
  const double vp = phi_tilde(plus);
  const double vm = phi_tilde(minus);
  counter.zo_phi += 2;
  if (!std::isfinite(vp) || !std::isfinite(vm))
    throw NumericError("two_point_estimate: estimator returned a non-finite value at x=" +
                       x.str());
  return (static_cast<double>(d_x) / (2.0 * delta) * (vp - vm)) * u;
}

IgfmResult igfm_run_with_estimator(const ValueEstimator& phi_tilde, const DenseVector& x0,
                                   const IgfmParams& params, Rng& rng,
                                   OracleCounter& counter) {
  if (params.big_t < 1) throw ContractViolation("igfm_run: need at least one iteration");
  if (params.eta < 0.0 || params.delta <= 0.0)
    throw ContractViolation("igfm_run: eta must be >= 0 and delta positive");

  const auto t_start = std::chrono::steady_clock::now();
  const int d_x = static_cast<int>(x0.size());
  IgfmResult res;
  Trace& trace = res.trace;
  const std::uint64_t stride =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(params.big_t) / 65536);
  trace.set_meta("solver", "igfm");
  trace.set_meta("eta", params.eta);
  trace.set_meta("big_t", static_cast<std::uint64_t>(params.big_t));
  trace.set_meta("delta", params.delta);
  trace.set_meta("sub_zeta", params.sub_zeta);
  trace.set_meta("trace_stride", stride);

  std::vector<DenseVector> xs;
  xs.reserve(static_cast<std::size_t>(params.big_t));
  DenseVector x = x0;
  for (std::int64_t t = 0; t < params.big_t; ++t) {
    xs.push_back(x);
    DenseVector u = sample_unit_sphere(rng, d_x);
    DenseVector ghat = two_point_estimate(phi_tilde, x, u, params.delta, d_x, counter);
    DenseVector x_next = sub_scaled(x, params.eta, ghat);
    if (static_cast<std::uint64_t>(t) % stride == 0) {
      TraceRow row;
      row.iter = static_cast<std::uint64_t>(t);
      row.epoch = 0;
      row.k = t;
      row.step_norm = (x_next - x).norm();
      row.grad_est_norm = ghat.norm();
      row.counters = counter;
      row.wall_ns = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(
              std::chrono::steady_clock::now() - t_start)
              .count());
      trace.rows.push_back(row);
    }
    x = std::move(x_next);
  }
  const std::uint64_t pick = rng.uniform_int(static_cast<std::uint64_t>(params.big_t));
  res.x_out = xs[static_cast<std::size_t>(pick)];
  trace.set_meta("output_index", pick);
  return res;
}

IgfmResult igfm_run(const BilevelProblem& p, const DenseVector& x0, const DenseVector& y0,
                    const IgfmParams& params, Rng& rng, OracleCounter& counter) {
  if (static_cast<int>(x0.size()) != p.d_x || static_cast<int>(y0.size()) != p.d_y)
    throw ContractViolation("igfm_run: dimension mismatch");
  // Fresh switching-gradient solve per probe, warm-started from the previous
  // LL output; probes are never cached.
  CountedProblem cp(p, counter);
  DenseVector y_warm = y0;
  const ValueEstimator phi_tilde = [&](const DenseVector& query) {
    SgmResult sub = sgm_run(p, query, y_warm, params.sub_params, counter);
    y_warm = sub.y_out;
    return cp.f(query, sub.y_out);
  };
  IgfmResult res = igfm_run_with_estimator(phi_tilde, x0, params, rng, counter);
  res.trace.set_meta("problem", p.name);
  return res;
}

}  // namespace bilevel
