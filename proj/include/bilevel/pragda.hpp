#pragma once

#include <cstdint>
#include <functional>

#include "bilevel/raf2ba.hpp"
#include "bilevel/schedule.hpp"

namespace bilevel {

// Nonconvex-strongly-concave minimax instance: min_x max_y fbar(x, y).
struct MinimaxProblem {
  std::string name;
  int d_x = 0;
  int d_y = 0;
  ValueOracle fbar_val;
  GradOracle2 grad_fbar_x, grad_fbar_y;
  SmoothnessConstants constants;  // mu = strong-concavity modulus in y
  GroundTruth truth;              // about phibar(x) = max_y fbar(x, y)
};

// The minimax problem as a BLO instance with f = fbar and g = -fbar. For any
// penalty weight above 1 the penalized value function collapses to phibar, so
// the bilevel solver on this image reproduces the descent-ascent method.
BilevelProblem as_bilevel(const MinimaxProblem& p);

// Midpoint probe of the declared strong concavity in y: returns the worst
// observed violation of fbar((y+y')/2) >= (fbar(y)+fbar(y'))/2 + mu/8 ||y-y'||^2
// over random probes (<= tolerance when the declaration holds).
double concavity_violation(const MinimaxProblem& p, Rng& rng, int probes,
                           double x_radius = 1.0, double y_radius = 1.0);

struct PragdaIterInfo {
  std::int64_t t = 0;
  std::int64_t k = 0;
  const DenseVector& w;
  const DenseVector& y;
  const DenseVector& u;
  const DenseVector& x_next;
  double movement_stat = 0.0;
};

using PragdaObserver = std::function<void(const PragdaIterInfo&)>;

struct PragdaResult {
  DenseVector x_hat;
  Trace trace;
  OracleCounter counter;
  RunStatus status = RunStatus::ok;
};

// Perturbed restarted accelerated gradient descent-ascent: one warm-started
// accelerated ascent solve per UL step (run as descent on -fbar(w, .)),
// x = w - eta * grad_x fbar(w, y), with the same restart, perturbation and
// averaged-output logic as the bilevel solver.
PragdaResult pragda_run(const MinimaxProblem& p, const DenseVector& x0,
                        const PragdaParams& params, Rng& rng,
                        std::uint64_t budget = 1'000'000,
                        const PragdaObserver& observer = nullptr);

}  // namespace bilevel
