#pragma once

#include <cstdint>
#include <functional>

#include "bilevel/schedule.hpp"
#include "bilevel/trace.hpp"

namespace bilevel {

// Per-iteration snapshot offered to test instrumentation. k = -1 rows report
// the from-scratch inner solves at an epoch start (u and x_next are empty).
struct RafIterInfo {
  std::int64_t t = 0;
  std::int64_t k = 0;
  const DenseVector& w;
  const DenseVector& y;
  const DenseVector& z;
  const DenseVector& u;
  const DenseVector& x_next;
  double movement_stat = 0.0;  // k * sum of squared within-epoch steps, after this step
};

using RafObserver = std::function<void(const RafIterInfo&)>;

struct Raf2baResult {
  DenseVector x_hat;
  Trace trace;
  OracleCounter counter;
  RunStatus status = RunStatus::ok;
};

// Restarted accelerated fully first-order bilevel solver. Requires a
// strongly convex unconstrained lower level. Each UL iteration extrapolates
// w from the last two x iterates, warm-starts two inner accelerated solves
// (on g(w,.) and on f(w,.) + lambda*g(w,.)), forms the penalty gradient
// u = grad_x f + lambda*(grad_x g(.,y) - grad_x g(.,z)) and steps x = w - eta*u.
// An epoch restarts (optionally with a uniform-ball perturbation of x) when
// k * sum ||dx||^2 exceeds B^2; the run ends when an epoch survives K
// iterations, returning the average of w over the prefix selected by the
// smallest late-epoch step.
Raf2baResult raf2ba_run(const BilevelProblem& p, const DenseVector& x0,
                        const Raf2baParams& params, Rng& rng,
                        std::uint64_t budget = 1'000'000,
                        const RafObserver& observer = nullptr);

// Restart predicate of the movement test, exposed for direct unit checks.
inline bool restart_triggered(std::int64_t k, double sum_sq_steps, double big_b) {
  return static_cast<double>(k) * sum_sq_steps > big_b * big_b;
}

}  // namespace bilevel
