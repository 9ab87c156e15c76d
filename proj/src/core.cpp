#include "bilevel/core.hpp"

#include <cstdio>
#include <sstream>

namespace bilevel {

std::string DenseVector::str() const {
  std::ostringstream os;
  os << "[";
  const std::size_t shown = size() <= 16 ? size() : 16;
  char buf[32];
  for (std::size_t i = 0; i < shown; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v_[i]);
    os << (i ? ", " : "") << buf;
  }
  if (shown < size()) os << ", ... (" << size() << " entries)";
  os << "]";
  return os.str();
}

DenseVector sample_unit_sphere(Rng& rng, int d) {
  if (d < 1) throw ContractViolation("sample_unit_sphere: d must be >= 1");
  DenseVector u(static_cast<std::size_t>(d));
  double nrm = 0.0;
  do {
    for (int i = 0; i < d; ++i) u[static_cast<std::size_t>(i)] = rng.normal();
    nrm = u.norm();
  } while (nrm < 1e-12);
  return (1.0 / nrm) * u;
}

DenseVector sample_ball(Rng& rng, int d, double radius) {
  if (d < 1) throw ContractViolation("sample_ball: d must be >= 1");
  if (radius < 0.0) throw ContractViolation("sample_ball: radius must be >= 0");
  if (radius == 0.0) return DenseVector::zeros(static_cast<std::size_t>(d));
  DenseVector u = sample_unit_sphere(rng, d);
  const double r = radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
  return r * u;
}

DenseVector project_ball(const DenseVector& v, const DenseVector& center,
                         double radius) {
  v.check_same_dim(center, "project_ball");
  if (radius < 0.0) throw ContractViolation("project_ball: radius must be >= 0");
  DenseVector diff = v - center;
  const double dist = diff.norm();
  if (dist <= radius) return v;
  DenseVector out = center;
  out.axpy_in(radius / dist, diff);
  return out;
}

DenseVector project_box(const DenseVector& v, const DenseVector& lo,
                        const DenseVector& hi) {
  v.check_same_dim(lo, "project_box");
  v.check_same_dim(hi, "project_box");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (lo[i] > hi[i])
      throw ContractViolation("project_box: lo > hi at coordinate " + std::to_string(i));
  return clamp(v, lo, hi);
}

DenseVector generalized_gradient(const BilevelProblem& p, const DenseVector& x,
                                 const DenseVector& y, double eta) {
  if (eta <= 0.0) throw ContractViolation("generalized_gradient: eta must be positive");
  if (p.constants.ell > 0.0 && eta > 1.0 / p.constants.ell + 1e-15)
    throw ContractViolation("generalized_gradient: eta must be <= 1/ell");
  DenseVector g = p.grad_g_y(x, y);
  if (p.y_unconstrained || !p.project_y) return g;
  DenseVector stepped = sub_scaled(y, eta, g);
  DenseVector proj = p.project_y(stepped);
  return (1.0 / eta) * (y - proj);
}

double CountedProblem::checked_scalar(double v, const char* oracle, const DenseVector& x,
                                      const DenseVector& y) {
  if (!std::isfinite(v))
    throw NumericError(std::string("oracle ") + oracle + " returned a non-finite value at x=" +
                       x.str() + ", y=" + y.str());
  return v;
}

DenseVector CountedProblem::checked_vec(DenseVector v, int want_dim, const char* oracle,
                                        const DenseVector& x, const DenseVector& y) {
  if (static_cast<int>(v.size()) != want_dim)
    throw ContractViolation(std::string("oracle ") + oracle + " returned dimension " +
                            std::to_string(v.size()) + ", expected " +
                            std::to_string(want_dim));
  if (!v.all_finite())
    throw NumericError(std::string("oracle ") + oracle +
                       " returned a non-finite entry at x=" + x.str() + ", y=" + y.str());
  return v;
}

}  // namespace bilevel
