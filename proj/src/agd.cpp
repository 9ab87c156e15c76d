#include "bilevel/agd.hpp"

#include <cmath>

namespace bilevel {

AgdParams agd_params_for(double ell_h, double mu_h) {
  if (mu_h <= 0.0) throw ContractViolation("agd_params_for: mu_h must be positive");
  if (ell_h < mu_h) throw ContractViolation("agd_params_for: need ell_h >= mu_h");
  const double sk = std::sqrt(ell_h / mu_h);
  AgdParams p;
  p.step_alpha = 1.0 / ell_h;
  p.momentum_beta = (sk - 1.0) / (sk + 1.0);
  return p;
}

DenseVector agd_run(const GradOracle& grad_h, DenseVector z0, const AgdParams& params,
                    std::uint64_t& grad_queries) {
  if (params.step_alpha <= 0.0) throw ContractViolation("agd_run: step_alpha must be > 0");
  if (params.momentum_beta < 0.0 || params.momentum_beta >= 1.0)
    throw ContractViolation("agd_run: momentum_beta must be in [0, 1)");
  if (params.iters < 0) throw ContractViolation("agd_run: iters must be >= 0");

  DenseVector z = z0;
  DenseVector zt = std::move(z0);  // z~_0 = z_0
  for (std::int64_t t = 0; t < params.iters; ++t) {
    DenseVector g = grad_h(zt);
    ++grad_queries;
    zt.check_same_dim(g, "agd_run gradient");
    if (!g.all_finite())
      throw NumericError("agd_run: non-finite gradient at iterate " + zt.str());
    if (params.grad_tol > 0.0 && g.norm() <= params.grad_tol) return z;
    DenseVector z_next = sub_scaled(zt, params.step_alpha, g);
    zt = extrapolate(z_next, z, params.momentum_beta);
    z = std::move(z_next);
  }
  return z;
}

DenseVector agd_run(const GradOracle& grad_h, DenseVector z0, const AgdParams& params) {
  std::uint64_t scratch = 0;
  return agd_run(grad_h, std::move(z0), params, scratch);
}

}  // namespace bilevel
