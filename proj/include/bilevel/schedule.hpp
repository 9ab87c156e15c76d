#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bilevel/agd.hpp"
#include "bilevel/core.hpp"

namespace bilevel {

// Derived moduli of the value function of the penalized inner problem
// min_y f + lambda*(g - g*), together with the hyper-objective moduli they
// approximate. All closed forms; inputs are the problem's declared constants.
struct LambdaConstants {
  double lambda = 0.0;
  double d0 = 0.0;          // value gap:        |L*(x) - phi(x)|      <= d0/lambda
  double d1 = 0.0;          // gradient gap:     ||grad L* - grad phi|| <= d1/lambda
  double d2 = 0.0;          // Hessian gap:      ||H L* - H phi||       <= d2/lambda
  double l_lambda = 0.0;    // gradient-Lipschitz modulus of L*
  double rho_lambda = 0.0;  // Hessian-Lipschitz modulus of L*
  double l_tilde = 0.0;     // gradient-Lipschitz modulus of phi
  double rho_tilde = 0.0;   // Hessian-Lipschitz modulus of phi
  double kappa_prime = 0.0; // condition number of f + lambda*g in y
};

// Requires lambda >= 2*kappa (the penalized inner problem must be strongly
// convex with margin); throws ContractViolation otherwise.
LambdaConstants lambda_constants(const SmoothnessConstants& c, double lambda);

// Output guarantee factor of the first-order restart analysis: the averaged
// iterate satisfies ||grad L*(w_hat)|| <= kFospGradFactor * eps.
inline constexpr double kFospGradFactor = 83.0;

// Explicit multipliers for the constants the theory fixes only up to order.
// All default to 1 so schedules are runnable as printed.
struct ScheduleScale {
  double lambda = 1.0;    // penalty weight multiplier
  double chi = 1.0;       // log-factor multiplier in the high-probability schedule
  double theta = 1.0;     // momentum-damping multiplier (covers the 4x variant)
  double big_c = 1.0;     // the free constant C in the perturbation radius
  double rho_floor = 1.0; // substituted for rho_lambda only when it is exactly 0
  double sub_zeta = 1.0;  // value-estimator accuracy multiplier (gradient-free)
  double big_t = 1.0;     // iteration-count multiplier (gradient-free)
  double eta = 1.0;       // step-size multiplier (gradient-free)
};

// Full parameter set of the restarted accelerated penalty solver.
struct Raf2baParams {
  double eta = 0.0;          // UL step size
  double theta = 0.0;        // momentum damping, in (0,1)
  std::int64_t big_k = 0;    // restart horizon K
  double big_b = 0.0;        // restart trigger B
  double lambda = 0.0;       // penalty weight
  double sigma = 0.0;        // inner-solve tolerance
  bool perturbation = false;
  double pert_radius = 0.0;
  AgdParams agd_g;           // inner solver on g(w, .)
  AgdParams agd_fg;          // inner solver on f(w, .) + lambda*g(w, .)
  LambdaConstants lc;
  double eps = 0.0;          // target accuracy the schedule was built for
  double rho_eff = 0.0;      // rho_lambda after the zero floor
  double chat_coeff = 0.0;   // movement coefficient inside the warm-start bounds
  std::optional<double> user_chat_z, user_chat_y;  // caller-supplied norm bounds
  // Explicit inner iteration counts; when set they replace the log-rule values
  // (used by the minimax-equivalence configuration and hand-tuned runs).
  std::optional<std::int64_t> t_g_init, t_g_step, t_fg_init, t_fg_step;
  ScheduleScale scale;
};

// First-order-stationarity schedule: eta = 1/(4 L_lambda), B = sqrt(eps/rho),
// theta = (rho*eps*eta^2)^(1/4), K = ceil(1/theta), sigma = eps^2,
// lambda = scale * max(kappa^2/Delta, kappa^3/eps), perturbation off.
Raf2baParams fosp_schedule(const SmoothnessConstants& c, double eps, double delta_gap,
                           const ScheduleScale& scale = {});

// Second-order-stationarity schedule: chi = ceil(scale * log(d_x/(zeta*eps))),
// theta = (1/2)(rho*eps*eta^2)^(1/4), K = ceil(2*chi/theta),
// B = sqrt(eps/rho)/(288 chi^2), r = min of the four candidates,
// sigma = min(rho*B*zeta*r*theta/(2 sqrt(d_x)), eps^2), perturbation on.
Raf2baParams sosp_schedule(const SmoothnessConstants& c, double eps, double delta_gap,
                           double zeta, int d_x, const ScheduleScale& scale = {});

// Same as the two above but from an already-computed constants set; exists so
// tests can inject corrupted constants and watch the pinned values break.
Raf2baParams fosp_schedule_from(const SmoothnessConstants& c, const LambdaConstants& lc,
                                double eps, const ScheduleScale& scale = {});
Raf2baParams sosp_schedule_from(const SmoothnessConstants& c, const LambdaConstants& lc,
                                double eps, double zeta, int d_x,
                                const ScheduleScale& scale = {});

// Inner iteration counts. k = -1 is the from-scratch solve after a restart
// (the argument carries the warm-start norm bound chat); k >= 0 is the
// tracking solve. A log argument <= 1 clamps the count to 1.
std::int64_t inner_iters_g(const SmoothnessConstants& c, const LambdaConstants& lc,
                           double sigma, double big_b, double chat_z, int k);
std::int64_t inner_iters_fg(const SmoothnessConstants& c, const LambdaConstants& lc,
                            double sigma, double big_b, double chat_y, int k);

// Parameter set of the restarted accelerated descent-ascent solver.
struct PragdaParams {
  double eta = 0.0;
  double theta = 0.0;
  std::int64_t big_k = 0;
  double big_b = 0.0;
  double sigma = 0.0;
  double pert_radius = 0.0;
  AgdParams agd;            // inner ascent solver (descent on -fbar(w, .))
  double eps = 0.0;
  double l_used = 0.0;      // (kappa+1)*ell
  double rho_used = 0.0;    // 4*sqrt(2)*kappa^3*rho
  double chat_coeff = 0.0;
  std::optional<double> user_chat_y;
  std::optional<std::int64_t> t_init, t_step;  // explicit inner count overrides
  ScheduleScale scale;
};

// The second-order schedule instantiated with the tighter minimax moduli
// (kappa+1)*ell and 4*sqrt(2)*kappa^3*rho. Rejects rho = 0.
PragdaParams pragda_schedule(const SmoothnessConstants& c, double eps, double delta_gap,
                             double zeta, int d_x, const ScheduleScale& scale = {});

// Switching-gradient parameters.
struct SgmParams {
  std::int64_t k0 = 0;        // warm-up iterations
  std::int64_t big_k = 0;     // main iterations
  double tau = 0.0;           // step size
  double sgm_threshold = 0.0; // switching threshold
};

// theta = min(zeta/4, (nu/(4r)) (zeta/C_f)^r)  [the safe reading: the output
// feasibility slack is 4*theta, so theta <= zeta/4 makes both accuracy
// criteria hold], K0 = K = ceil(4 R^2 max(C_f^2, C_g^2)/theta^2),
// tau = R/(max(C_f, C_g) sqrt(K)). Requires the Hoelder pair.
SgmParams sgm_schedule(const SmoothnessConstants& c, double zeta);

// Gradient-free outer loop parameters.
struct IgfmParams {
  double eta = 0.0;
  std::int64_t big_t = 0;
  double delta = 0.0;      // smoothing radius
  SgmParams sub_params;    // value-estimator sub-solver
  double sub_zeta = 0.0;   // accuracy target handed to the sub-solver
};

// T = ceil(scale * d^(3/2) (C_phi^4/eps^4 + Delta C_phi^3/(delta eps^4))),
// eta = scale * sqrt(delta (Delta + delta C_phi) / (d^(3/2) C_phi^3 T)),
// sub-solver accuracy zeta = scale * delta eps^2/(d C_phi) with
// C_phi = (ell/sharp_mod + 1) C_f. Requires sharp_mod.
IgfmParams igfm_schedule(const SmoothnessConstants& c, double eps, double delta,
                         double delta_gap, int d_x, const ScheduleScale& scale = {});

// One row of the generated parameter-table documentation. Context labels tie
// the symbol to the schedule it belongs to; the knob column names the
// ScheduleScale field that multiplies it, if any.
struct ScheduleRow {
  std::string symbol;
  std::string context;
  std::string formula;
  std::string code_path;
  std::string knob;
};

// The canonical symbol registry, defined next to the formulas above. The doc
// generator emits it and fails the build if the expected symbol set and the
// registry ever disagree.
const std::vector<ScheduleRow>& schedule_table();

}  // namespace bilevel
