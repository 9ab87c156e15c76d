#include "bilevel/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "bilevel/trace.hpp"

namespace bilevel {

namespace {

double sq(double v) { return v * v; }
double cube(double v) { return v * v * v; }

std::int64_t ceil_count(double v) {
  if (!(v > 0.0)) return 1;
  if (v > 9.0e18) throw ContractViolation("schedule: iteration count overflows int64");
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v)));
}

}  // namespace

LambdaConstants lambda_constants(const SmoothnessConstants& c, double lambda) {
  if (c.mu <= 0.0) throw ContractViolation("lambda_constants: mu must be positive");
  if (c.ell < c.mu) throw ContractViolation("lambda_constants: need ell >= mu");
  const double kappa = c.kappa();
  if (lambda < 2.0 * kappa)
    throw ContractViolation("lambda_constants: need lambda >= 2*kappa = " +
                            format_double(2.0 * kappa));
  const double l = c.ell, mu = c.mu, rho = c.rho, M = c.big_m, nu = c.nu3;
  if (lambda * mu <= l)
    throw ContractViolation("lambda_constants: lambda*mu <= ell, kappa' undefined");

  LambdaConstants out;
  out.lambda = lambda;
  out.d0 = (M + M * l / (2.0 * mu)) * (M / mu);
  out.d1 = (l + (2.0 * rho * l + M * rho) / (2.0 * mu) + M * rho * l / (2.0 * sq(mu))) *
           (M / mu);
  out.l_lambda = l + (5.0 * sq(l) + M * rho) / mu + (2.0 * M * l * rho + 2.0 * cube(l)) / sq(mu) +
                 2.0 * M * sq(l) * rho / cube(mu);
  out.d2 = 2.0 * l * sq(1.0 + 2.0 * l / mu) * sq(l / mu + M * rho / sq(mu)) +
           sq(1.0 + l / mu) * (M * rho / mu + M * l * rho / sq(mu) +
                               sq(M) * nu / (2.0 * sq(mu)) + sq(M) * sq(rho) / (2.0 * cube(mu)));
  out.rho_lambda =
      sq(1.0 + 4.0 * l / mu) * (3.0 * rho + 2.0 * l * rho / mu) +
      sq(1.0 + l / mu) * (M * nu / mu + M * sq(rho) / sq(mu)) +
      (2.0 + 5.0 * l / mu) * (1.0 + 2.0 * l / mu) * (l * rho / mu + M * sq(rho) / sq(mu)) +
      (2.0 * l * rho / sq(mu)) * sq(1.0 + l / mu) * (l + M * rho / mu) +
      (14.0 * l * rho / sq(mu)) * (1.0 + 2.0 * l / mu) * (l / mu + M * rho / sq(mu)) +
      (50.0 * sq(l) / cube(mu)) * (M * nu / mu + rho);
  out.l_tilde = l + (2.0 * sq(l) + rho * M) / mu + (cube(l) + 2.0 * rho * l * M) / sq(mu) +
                rho * sq(l) * M / cube(mu);
  const double onek = 1.0 + l / mu;
  out.rho_tilde =
      (rho + (2.0 * l * rho + M * nu) / mu + (2.0 * M * l * nu + rho * sq(l)) / sq(mu) +
       M * sq(l) * nu / cube(mu)) * onek +
      (2.0 * l * rho / mu + (4.0 * M * sq(rho) + 2.0 * sq(l) * rho) / sq(mu) +
       2.0 * M * l * sq(rho) / cube(mu)) * sq(onek) +
      (M * sq(rho) / sq(mu) + rho * l / mu) * cube(onek);
  out.kappa_prime = (lambda + 1.0) * l / (lambda * mu - l);
  return out;
}

namespace {

double effective_rho(const LambdaConstants& lc, const ScheduleScale& scale) {
  if (lc.rho_lambda > 0.0) return lc.rho_lambda;
  if (scale.rho_floor <= 0.0)
    throw ContractViolation("schedule: rho_lambda is 0 and rho_floor is not positive");
  return scale.rho_floor;
}

void check_curvature_window(double eps, double l_smooth, double rho_eff) {
  if (eps > sq(l_smooth) / rho_eff)
    throw ContractViolation(
        "schedule: target accuracy too coarse for these moduli (need eps <= "
        "L^2/rho; got eps = " + format_double(eps) + ", L^2/rho = " +
        format_double(sq(l_smooth) / rho_eff) + ")");
}

double pick_lambda(double kappa, double eps, double delta_gap, double lam_scale,
                   bool with_sosp_term) {
  double lam = std::max(sq(kappa) / delta_gap, cube(kappa) / eps);
  if (with_sosp_term) lam = std::max(lam, std::pow(kappa, 6) / std::sqrt(eps));
  lam *= lam_scale;
  return std::max(lam, 2.0 * kappa);  // keep the penalized problem strongly convex
}

}  // namespace


Raf2baParams fosp_schedule_from(const SmoothnessConstants& c, const LambdaConstants& lc,
                                double eps, const ScheduleScale& scale) {
  if (eps <= 0.0) throw ContractViolation("fosp_schedule: eps must be positive");
  const double rho_eff = effective_rho(lc, scale);
  check_curvature_window(eps, lc.l_lambda, rho_eff);

  Raf2baParams p;
  p.lc = lc;
  p.lambda = lc.lambda;
  p.eps = eps;
  p.rho_eff = rho_eff;
  p.scale = scale;
  p.eta = 1.0 / (4.0 * lc.l_lambda);
  p.big_b = std::sqrt(eps / rho_eff);
  p.theta = scale.theta * std::pow(rho_eff * eps * sq(p.eta), 0.25);
  if (!(p.theta > 0.0 && p.theta < 1.0))
    throw ContractViolation("fosp_schedule: theta fell outside (0,1); adjust scale.theta");
  p.big_k = ceil_count(1.0 / p.theta);
  p.sigma = sq(eps);
  p.perturbation = false;
  p.pert_radius = 0.0;
  p.agd_g = agd_params_for(c.ell, c.mu);
  p.agd_fg = agd_params_for((p.lambda + 1.0) * c.ell, p.lambda * c.mu - c.ell);
  p.chat_coeff = 2.0 * p.big_b + p.eta * p.sigma + p.eta * scale.big_c;
  return p;
}

Raf2baParams fosp_schedule(const SmoothnessConstants& c, double eps, double delta_gap,
                           const ScheduleScale& scale) {
  if (delta_gap <= 0.0) throw ContractViolation("fosp_schedule: delta_gap must be positive");
  const double lambda = pick_lambda(c.kappa(), eps, delta_gap, scale.lambda, false);
  return fosp_schedule_from(c, lambda_constants(c, lambda), eps, scale);
}

Raf2baParams sosp_schedule_from(const SmoothnessConstants& c, const LambdaConstants& lc,
                                double eps, double zeta, int d_x,
                                const ScheduleScale& scale) {
  if (eps <= 0.0) throw ContractViolation("sosp_schedule: eps must be positive");
  if (zeta <= 0.0 || zeta >= 1.0)
    throw ContractViolation("sosp_schedule: zeta must be in (0,1)");
  if (d_x < 1) throw ContractViolation("sosp_schedule: d_x must be >= 1");
  const double rho_eff = effective_rho(lc, scale);
  check_curvature_window(eps, lc.l_lambda, rho_eff);

  Raf2baParams p;
  p.lc = lc;
  p.lambda = lc.lambda;
  p.eps = eps;
  p.rho_eff = rho_eff;
  p.scale = scale;
  const double chi =
      std::max(1.0, std::ceil(scale.chi * std::log(static_cast<double>(d_x) / (zeta * eps))));
  p.eta = 1.0 / (4.0 * lc.l_lambda);
  p.theta = scale.theta * 0.5 * std::pow(rho_eff * eps * sq(p.eta), 0.25);
  if (!(p.theta > 0.0 && p.theta < 1.0))
    throw ContractViolation("sosp_schedule: theta fell outside (0,1); adjust scale.theta");
  p.big_k = ceil_count(2.0 * chi / p.theta);
  p.big_b = std::sqrt(eps / rho_eff) / (288.0 * sq(chi));
  const double B = p.big_b;
  const double K = static_cast<double>(p.big_k);
  p.pert_radius = std::min(std::min(lc.l_lambda * sq(B) / (4.0 * scale.big_c),
                                    (B + sq(B)) / std::sqrt(2.0)),
                           std::min(p.theta * B / (20.0 * K),
                                    std::sqrt(p.theta * sq(B) / (2.0 * K))));
  p.perturbation = true;
  p.sigma = std::min(rho_eff * B * zeta * p.pert_radius * p.theta /
                         (2.0 * std::sqrt(static_cast<double>(d_x))),
                     sq(eps));
  p.sigma = std::max(p.sigma, 1e-250);  // keep logs of 1/sigma finite
  p.agd_g = agd_params_for(c.ell, c.mu);
  p.agd_fg = agd_params_for((p.lambda + 1.0) * c.ell, p.lambda * c.mu - c.ell);
  p.chat_coeff = 2.0 * B + sq(B) + p.eta * p.sigma + p.eta * scale.big_c;
  return p;
}

Raf2baParams sosp_schedule(const SmoothnessConstants& c, double eps, double delta_gap,
                           double zeta, int d_x, const ScheduleScale& scale) {
  if (delta_gap <= 0.0) throw ContractViolation("sosp_schedule: delta_gap must be positive");
  const double lambda = pick_lambda(c.kappa(), eps, delta_gap, scale.lambda, true);
  return sosp_schedule_from(c, lambda_constants(c, lambda), eps, zeta, d_x, scale);
}

namespace {

std::int64_t count_from_log(double prefactor, double log_arg) {
  if (!(log_arg > 1.0)) return 1;  // ceiling of a nonpositive count is meaningless
  return ceil_count(prefactor * std::log(log_arg));
}

}  // namespace

std::int64_t inner_iters_g(const SmoothnessConstants& c, const LambdaConstants& lc,
                           double sigma, double big_b, double chat_z, int k) {
  if (sigma <= 0.0) throw ContractViolation("inner_iters_g: sigma must be positive");
  (void)lc;
  const double kappa = c.kappa();
  const double lead = 2.0 * c.ell * std::sqrt(kappa + 1.0) / sigma;
  const double arg = (k < 0) ? lead * chat_z
                             : lead * (sigma / (2.0 * c.ell) + 2.0 * kappa * big_b);
  return count_from_log(2.0 * std::sqrt(kappa), arg);
}

std::int64_t inner_iters_fg(const SmoothnessConstants& c, const LambdaConstants& lc,
                            double sigma, double big_b, double chat_y, int k) {
  if (sigma <= 0.0) throw ContractViolation("inner_iters_fg: sigma must be positive");
  const double kp = lc.kappa_prime;
  const double ell_fg = (lc.lambda + 1.0) * c.ell;
  const double lead = 2.0 * ell_fg * std::sqrt(kp + 1.0) / sigma;
  const double arg = (k < 0) ? lead * chat_y
                             : lead * (sigma / (2.0 * ell_fg) + 2.0 * kp * big_b);
  return count_from_log(2.0 * std::sqrt(kp), arg);
}

PragdaParams pragda_schedule(const SmoothnessConstants& c, double eps, double delta_gap,
                             double zeta, int d_x, const ScheduleScale& scale) {
  if (eps <= 0.0) throw ContractViolation("pragda_schedule: eps must be positive");
  if (delta_gap <= 0.0)
    throw ContractViolation("pragda_schedule: delta_gap must be positive");
  if (zeta <= 0.0 || zeta >= 1.0)
    throw ContractViolation("pragda_schedule: zeta must be in (0,1)");
  if (d_x < 1) throw ContractViolation("pragda_schedule: d_x must be >= 1");
  const double kappa = c.kappa();
  const double l_bar = (kappa + 1.0) * c.ell;
  const double rho_bar = 4.0 * std::sqrt(2.0) * cube(kappa) * c.rho;
  if (rho_bar <= 0.0)
    throw ContractViolation("pragda_schedule: rho is 0, restart trigger undefined");
  check_curvature_window(eps, l_bar, rho_bar);

  PragdaParams p;
  p.eps = eps;
  p.l_used = l_bar;
  p.rho_used = rho_bar;
  p.scale = scale;
  const double chi =
      std::max(1.0, std::ceil(scale.chi * std::log(static_cast<double>(d_x) / (zeta * eps))));
  p.eta = 1.0 / (4.0 * l_bar);
  p.theta = scale.theta * 0.5 * std::pow(rho_bar * eps * sq(p.eta), 0.25);
  if (!(p.theta > 0.0 && p.theta < 1.0))
    throw ContractViolation("pragda_schedule: theta fell outside (0,1)");
  p.big_k = ceil_count(2.0 * chi / p.theta);
  p.big_b = std::sqrt(eps / rho_bar) / (288.0 * sq(chi));
  const double B = p.big_b;
  const double K = static_cast<double>(p.big_k);
  p.pert_radius = std::min(
      std::min(l_bar * sq(B) / (4.0 * scale.big_c), (B + sq(B)) / std::sqrt(2.0)),
      std::min(p.theta * B / (20.0 * K), std::sqrt(p.theta * sq(B) / (2.0 * K))));
  p.sigma = std::min(rho_bar * B * zeta * p.pert_radius * p.theta /
                         (2.0 * std::sqrt(static_cast<double>(d_x))),
                     sq(eps));
  p.sigma = std::max(p.sigma, 1e-250);
  p.agd = agd_params_for(c.ell, c.mu);
  p.chat_coeff = 2.0 * B + sq(B) + p.eta * p.sigma + p.eta * scale.big_c;
  return p;
}

SgmParams sgm_schedule(const SmoothnessConstants& c, double zeta) {
  if (zeta <= 0.0) throw ContractViolation("sgm_schedule: zeta must be positive");
  if (!c.hoelder.declared())
    throw ContractViolation("sgm_schedule: Hoelder error-bound constants are required");
  if (c.c_f <= 0.0) throw ContractViolation("sgm_schedule: C_f must be positive");
  if (c.radius_r <= 0.0) throw ContractViolation("sgm_schedule: set diameter R required");
  const double nu = c.hoelder.coeff, r = c.hoelder.order;
  SgmParams p;
  p.sgm_threshold =
      std::min(zeta / 4.0, (nu / (4.0 * r)) * std::pow(zeta / c.c_f, r));
  const double cmax = std::max(c.c_f, c.c_g);
  const double k = std::ceil(4.0 * sq(c.radius_r) * sq(cmax) / sq(p.sgm_threshold));
  if (!(k < 4.0e18))
    throw ContractViolation("sgm_schedule: iteration count overflows; zeta too small");
  p.big_k = static_cast<std::int64_t>(k);
  p.k0 = p.big_k;
  p.tau = c.radius_r / (cmax * std::sqrt(static_cast<double>(p.big_k)));
  return p;
}

IgfmParams igfm_schedule(const SmoothnessConstants& c, double eps, double delta,
                         double delta_gap, int d_x, const ScheduleScale& scale) {
  if (eps <= 0.0 || delta <= 0.0)
    throw ContractViolation("igfm_schedule: eps and delta must be positive");
  if (delta_gap <= 0.0) throw ContractViolation("igfm_schedule: delta_gap must be positive");
  if (d_x < 1) throw ContractViolation("igfm_schedule: d_x must be >= 1");
  if (c.sharp_mod <= 0.0)
    throw ContractViolation("igfm_schedule: sharpness modulus is required");
  if (c.c_f <= 0.0) throw ContractViolation("igfm_schedule: C_f must be positive");

  const double c_phi = (c.ell / c.sharp_mod + 1.0) * c.c_f;
  const double d = static_cast<double>(d_x);
  const double d32 = std::pow(d, 1.5);
  IgfmParams p;
  p.delta = delta;
  p.big_t = ceil_count(scale.big_t * d32 *
                       (std::pow(c_phi, 4) / std::pow(eps, 4) +
                        delta_gap * cube(c_phi) / (delta * std::pow(eps, 4))));
  p.eta = scale.eta * std::sqrt(delta * (delta_gap + delta * c_phi) /
                                (d32 * cube(c_phi) * static_cast<double>(p.big_t)));
  p.sub_zeta = scale.sub_zeta * delta * sq(eps) / (d * c_phi);
  p.sub_params = sgm_schedule(c, p.sub_zeta);
  return p;
}

// ---------------------------------------------------------------------------
// Parameter-table registry. Every schedule symbol above appears exactly once;
// the doc generator checks the set and fails the build on drift.
// ---------------------------------------------------------------------------
const std::vector<ScheduleRow>& schedule_table() {
  static const std::vector<ScheduleRow> rows = {
      {"kappa", "moduli", "ell/mu", "SmoothnessConstants::kappa", ""},
      {"kappa_prime", "moduli", "(lambda+1)*ell/(lambda*mu - ell)",
       "lambda_constants -> LambdaConstants.kappa_prime", ""},
      {"D0", "penalty gap", "(M + M*ell/(2 mu)) * M/mu",
       "lambda_constants -> LambdaConstants.d0", ""},
      {"D1", "penalty gap",
       "(ell + (2 rho ell + M rho)/(2 mu) + M rho ell/(2 mu^2)) * M/mu",
       "lambda_constants -> LambdaConstants.d1", ""},
      {"D2", "penalty gap",
       "2 ell (1+2ell/mu)^2 (ell/mu + M rho/mu^2)^2 + (1+ell/mu)^2 (M rho/mu + M ell "
       "rho/mu^2 + M^2 nu/(2 mu^2) + M^2 rho^2/(2 mu^3))",
       "lambda_constants -> LambdaConstants.d2", ""},
      {"L_lambda", "penalty smoothness",
       "ell + (5 ell^2 + M rho)/mu + (2 M ell rho + 2 ell^3)/mu^2 + 2 M ell^2 rho/mu^3",
       "lambda_constants -> LambdaConstants.l_lambda", ""},
      {"rho_lambda", "penalty smoothness",
       "(1+4ell/mu)^2 (3rho + 2 ell rho/mu) + (1+ell/mu)^2 (M nu/mu + M rho^2/mu^2) + "
       "(2+5ell/mu)(1+2ell/mu)(ell rho/mu + M rho^2/mu^2) + (2 ell rho/mu^2)(1+ell/mu)^2 "
       "(ell + M rho/mu) + (14 ell rho/mu^2)(1+2ell/mu)(ell/mu + M rho/mu^2) + "
       "(50 ell^2/mu^3)(M nu/mu + rho)",
       "lambda_constants -> LambdaConstants.rho_lambda", ""},
      {"L_tilde", "hyper-objective smoothness",
       "ell + (2 ell^2 + rho M)/mu + (ell^3 + 2 rho ell M)/mu^2 + rho ell^2 M/mu^3",
       "lambda_constants -> LambdaConstants.l_tilde", ""},
      {"rho_tilde", "hyper-objective smoothness",
       "(rho + (2 ell rho + M nu)/mu + (2 M ell nu + rho ell^2)/mu^2 + M ell^2 nu/mu^3)"
       "(1+ell/mu) + (2 ell rho/mu + (4 M rho^2 + 2 ell^2 rho)/mu^2 + 2 M ell rho^2/mu^3)"
       "(1+ell/mu)^2 + (M rho^2/mu^2 + rho ell/mu)(1+ell/mu)^3",
       "lambda_constants -> LambdaConstants.rho_tilde", ""},
      {"eta", "first/second-order schedules", "1/(4*L_lambda)",
       "fosp_schedule/sosp_schedule -> Raf2baParams.eta", ""},
      {"alpha", "inner solve on g", "1/ell", "agd_params_for -> AgdParams.step_alpha", ""},
      {"beta", "inner solve on g", "(sqrt(kappa)-1)/(sqrt(kappa)+1)",
       "agd_params_for -> AgdParams.momentum_beta", ""},
      {"alpha_prime", "inner solve on f+lambda*g", "1/((lambda+1)*ell)",
       "fosp_schedule/sosp_schedule -> Raf2baParams.agd_fg.step_alpha", ""},
      {"beta_prime", "inner solve on f+lambda*g",
       "(sqrt(kappa')-1)/(sqrt(kappa')+1)",
       "fosp_schedule/sosp_schedule -> Raf2baParams.agd_fg.momentum_beta", ""},
      {"lambda.fosp", "first-order schedule", "max(kappa^2/Delta, kappa^3/eps)",
       "fosp_schedule -> Raf2baParams.lambda", "scale.lambda"},
      {"lambda.sosp", "second-order schedule",
       "max(kappa^2/Delta, kappa^3/eps, kappa^6/sqrt(eps))",
       "sosp_schedule -> Raf2baParams.lambda", "scale.lambda"},
      {"B.fosp", "first-order schedule", "sqrt(eps/rho_lambda)",
       "fosp_schedule -> Raf2baParams.big_b", ""},
      {"theta.fosp", "first-order schedule", "(rho_lambda*eps*eta^2)^(1/4)",
       "fosp_schedule -> Raf2baParams.theta", "scale.theta"},
      {"K.fosp", "first-order schedule", "ceil(1/theta)",
       "fosp_schedule -> Raf2baParams.big_k", ""},
      {"sigma.fosp", "first-order schedule", "eps^2",
       "fosp_schedule -> Raf2baParams.sigma", ""},
      {"chi", "second-order schedule", "ceil(log(d_x/(zeta*eps)))",
       "sosp_schedule (local)", "scale.chi"},
      {"B.sosp", "second-order schedule", "sqrt(eps/rho_lambda)/(288*chi^2)",
       "sosp_schedule -> Raf2baParams.big_b", ""},
      {"theta.sosp", "second-order schedule", "(1/2)*(rho_lambda*eps*eta^2)^(1/4)",
       "sosp_schedule -> Raf2baParams.theta", "scale.theta"},
      {"K.sosp", "second-order schedule", "ceil(2*chi/theta)",
       "sosp_schedule -> Raf2baParams.big_k", ""},
      {"r.sosp", "second-order schedule",
       "min(L_lambda*B^2/(4C), (B+B^2)/sqrt(2), theta*B/(20K), sqrt(theta*B^2/(2K)))",
       "sosp_schedule -> Raf2baParams.pert_radius", "scale.big_c"},
      {"sigma.sosp", "second-order schedule",
       "min(rho_lambda*B*zeta*r*theta/(2*sqrt(d_x)), eps^2)",
       "sosp_schedule -> Raf2baParams.sigma", ""},
      {"T_g.init", "inner-loop counts",
       "ceil(2*sqrt(kappa)*log(2*ell*sqrt(kappa+1)*Chat_z/sigma))",
       "inner_iters_g (k = -1)", ""},
      {"T_g.step", "inner-loop counts",
       "ceil(2*sqrt(kappa)*log(2*ell*sqrt(kappa+1)/sigma*(sigma/(2 ell) + 2*kappa*B)))",
       "inner_iters_g (k >= 0)", ""},
      {"T_fg.init", "inner-loop counts",
       "ceil(2*sqrt(kappa')*log(2*(lambda+1)*ell*sqrt(kappa'+1)*Chat_y/sigma))",
       "inner_iters_fg (k = -1)", ""},
      {"T_fg.step", "inner-loop counts",
       "ceil(2*sqrt(kappa')*log(2*(lambda+1)*ell*sqrt(kappa'+1)/sigma*"
       "(sigma/(2(lambda+1)ell) + 2*kappa'*B)))",
       "inner_iters_fg (k >= 0)", ""},
      {"Chat_z", "inner-loop counts",
       "||z*(x_0)|| + (2B [+ B^2] + eta*sigma + eta*C)*kappa*Delta_lambda*"
       "sqrt(rho_lambda)*eps^(-3/2)",
       "raf2ba_run warm-start bound (estimated or user-supplied)", "scale.big_c"},
      {"Chat_y", "inner-loop counts",
       "||y*(x_0)|| + (2B [+ B^2] + eta*sigma + eta*C)*kappa'*Delta_lambda*"
       "sqrt(rho_lambda)*eps^(-3/2)",
       "raf2ba_run warm-start bound (estimated or user-supplied)", ""},
      {"L_bar", "minimax schedule", "(kappa+1)*ell", "pragda_schedule -> PragdaParams.l_used",
       ""},
      {"rho_bar", "minimax schedule", "4*sqrt(2)*kappa^3*rho",
       "pragda_schedule -> PragdaParams.rho_used", ""},
      {"theta.sw", "switching schedule", "min(zeta/4, (nu/(4r))*(zeta/C_f)^r)",
       "sgm_schedule -> SgmParams.sgm_threshold", ""},
      {"K0.sw", "switching schedule", "ceil(4*R^2*max(C_f^2, C_g^2)/theta^2)",
       "sgm_schedule -> SgmParams.k0", ""},
      {"K.sw", "switching schedule", "K0", "sgm_schedule -> SgmParams.big_k", ""},
      {"tau.sw", "switching schedule", "R/(max(C_f, C_g)*sqrt(K))",
       "sgm_schedule -> SgmParams.tau", ""},
      {"C_phi", "gradient-free schedule", "(ell/sharp_mod + 1)*C_f",
       "igfm_schedule (local)", ""},
      {"T.gf", "gradient-free schedule",
       "ceil(d_x^(3/2)*(C_phi^4/eps^4 + Delta*C_phi^3/(delta*eps^4)))",
       "igfm_schedule -> IgfmParams.big_t", "scale.big_t"},
      {"eta.gf", "gradient-free schedule",
       "sqrt(delta*(Delta + delta*C_phi)/(d_x^(3/2)*C_phi^3*T))",
       "igfm_schedule -> IgfmParams.eta", "scale.eta"},
      {"zeta.sub", "gradient-free schedule", "delta*eps^2/(d_x*C_phi)",
       "igfm_schedule -> IgfmParams.sub_zeta", "scale.sub_zeta"},
      {"rho_floor", "degenerate-curvature fallback",
       "substituted for rho_lambda only when rho_lambda = 0 (any positive bound is "
       "valid for a quadratic)",
       "fosp_schedule/sosp_schedule -> Raf2baParams.rho_eff", "scale.rho_floor"},
  };
  return rows;
}

}  // namespace bilevel
