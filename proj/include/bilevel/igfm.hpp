#pragma once

#include <cstdint>
#include <functional>

#include "bilevel/schedule.hpp"
#include "bilevel/sgm.hpp"

namespace bilevel {

using ValueEstimator = std::function<double(const DenseVector&)>;

// Two-point directional estimate d_x/(2*delta) * (phi~(x+delta*u) -
// phi~(x-delta*u)) * u along a unit direction u. Exactly two value queries,
// tallied as zeroth-order hyper-objective queries.
DenseVector two_point_estimate(const ValueEstimator& phi_tilde, const DenseVector& x,
                               const DenseVector& u, double delta, int d_x,
                               OracleCounter& counter);

struct IgfmResult {
  DenseVector x_out;
  Trace trace;
};

// Gradient-free outer loop over an inexact hyper-objective value estimator.
// Each iteration samples a sphere direction, probes the estimator at
// x +- delta*u (fresh switching-gradient solves, warm-started from the
// previous LL output), and steps against the two-point estimate. The output
// is drawn uniformly from {x_0, ..., x_{T-1}} using the run's own stream.
IgfmResult igfm_run(const BilevelProblem& p, const DenseVector& x0,
                    const DenseVector& y0, const IgfmParams& params, Rng& rng,
                    OracleCounter& counter);

// Same loop over a caller-supplied estimator; the bundled-problem entry point
// above builds the switching-gradient estimator and forwards here.
IgfmResult igfm_run_with_estimator(const ValueEstimator& phi_tilde, const DenseVector& x0,
                                   const IgfmParams& params, Rng& rng,
                                   OracleCounter& counter);

}  // namespace bilevel
