#pragma once

#include <cstdint>
#include <functional>

#include "bilevel/vector.hpp"

namespace bilevel {

// Accelerated gradient descent on an unconstrained smooth strongly convex
// objective, the inner subroutine of every solver here. The iteration count
// is always supplied by the caller; there is no internal stopping rule beyond
// the optional early-exit tolerance (off by default).
struct AgdParams {
  double step_alpha = 0.0;     // > 0
  double momentum_beta = 0.0;  // in [0, 1)
  std::int64_t iters = 0;      // T >= 0
  double grad_tol = 0.0;       // early exit when ||grad|| <= grad_tol; 0 = off
};

using GradOracle = std::function<DenseVector(const DenseVector&)>;

// step_alpha = 1/ell_h, momentum_beta = (sqrt(kappa)-1)/(sqrt(kappa)+1);
// iters left at 0 for the caller's schedule to fill in.
AgdParams agd_params_for(double ell_h, double mu_h);

// Runs z_{t+1} = z~_t - alpha*grad(z~_t), z~_{t+1} = z_{t+1} + beta*(z_{t+1}-z_t)
// for exactly params.iters steps (fewer only if the early-exit tolerance
// fires). grad_queries is advanced by the number of gradient evaluations
// actually made.
DenseVector agd_run(const GradOracle& grad_h, DenseVector z0, const AgdParams& params,
                    std::uint64_t& grad_queries);

// Overload when the caller does not track query counts.
DenseVector agd_run(const GradOracle& grad_h, DenseVector z0, const AgdParams& params);

}  // namespace bilevel
