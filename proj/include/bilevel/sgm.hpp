#pragma once

#include <cstdint>
#include <functional>

#include "bilevel/schedule.hpp"
#include "bilevel/trace.hpp"

namespace bilevel {

struct SgmIterInfo {
  std::int64_t k = 0;
  bool objective_step = false;  // true: stepped on f; false: stepped on g
  double slack = 0.0;           // g(x, y_k) - ghat*
  const DenseVector& y;         // iterate the step was taken from
  const DenseVector& y_next;
};

using SgmObserver = std::function<void(const SgmIterInfo&)>;

struct SgmResult {
  DenseVector y_out;
  double g_hat_star = 0.0;
  Trace trace;
  RunStatus status = RunStatus::ok;
};

// Switching (sub)gradient method at a fixed UL point x. Phase one runs k0
// projected subgradient steps on g(x, .) and freezes ghat* = g(x, y_k0).
// Phase two takes an f-step whenever the g-slack is within 2*theta (recording
// the pre-step iterate into the average) and a g-step otherwise. Returns the
// average of the recorded iterates; throws if no step ever qualified, which
// means the schedule's guarantee premises do not hold for these constants.
SgmResult sgm_run(const BilevelProblem& p, const DenseVector& x, const DenseVector& y0,
                  const SgmParams& params, OracleCounter& counter,
                  const SgmObserver& observer = nullptr);

}  // namespace bilevel
