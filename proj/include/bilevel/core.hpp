#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bilevel/rng.hpp"
#include "bilevel/vector.hpp"

namespace bilevel {

// Problem-declared moduli feeding every parameter schedule. A zero entry means
// "not declared" unless a schedule gives it a meaning.
//
// Naming notes: the usual symbol overloads are split apart. sharp_mod is the
// sharpness modulus of the gradient-dominance / weak-sharp-minimum conditions
// (not the AGD step size); hoelder is the (coefficient, order) pair of the
// Hoelderian error bound (not the third-derivative modulus nu3).
struct SmoothnessConstants {
  double ell = 0.0;       // gradient-Lipschitz modulus of f and g
  double mu = 0.0;        // strong-convexity modulus of g in y
  double rho = 0.0;       // Jacobian/Hessian-Lipschitz modulus
  double big_m = 0.0;     // value-Lipschitz modulus of f in y
  double nu3 = 0.0;       // third-derivative Lipschitz modulus
  double c_f = 0.0;       // Lipschitz modulus of f
  double c_g = 0.0;       // Lipschitz modulus of g(x, .)
  double radius_r = 0.0;  // diameter of the LL feasible set
  double sharp_mod = 0.0; // sharpness modulus

  struct Hoelder {
    double coeff = 0.0;  // nu_h
    double order = 0.0;  // r_h
    bool declared() const { return coeff > 0.0 && order > 0.0; }
  } hoelder;

  double kappa() const {
    if (mu <= 0.0) throw ContractViolation("kappa(): mu must be positive");
    return ell / mu;
  }
};

// Optional analytic knowledge about an instance, used by diagnostics and
// tests. Solvers never read it.
struct GroundTruth {
  std::function<DenseVector(const DenseVector&)> y_star;    // x -> y*(x)
  std::function<double(const DenseVector&)> phi;            // x -> phi(x)
  std::function<DenseVector(const DenseVector&)> grad_phi;  // x -> grad phi(x)
  // x -> dense row-major d_x*d_x Hessian of phi, when analytic.
  std::function<std::vector<double>(const DenseVector&)> hess_phi;
  std::function<double(const DenseVector&)> g_star;         // x -> g*(x)
  std::optional<DenseVector> x_star;
  std::optional<double> phi_star;
  // Instances whose phi is nonsmooth/discontinuous are exempted from the
  // finite-difference consistency check near their kink sets; fd_region, when
  // set, gives a (center, radius) ball known to be kink-free for probing.
  bool nonsmooth = false;
  std::optional<std::pair<DenseVector, double>> fd_region;
};

using ValueOracle = std::function<double(const DenseVector&, const DenseVector&)>;
using GradOracle2 = std::function<DenseVector(const DenseVector&, const DenseVector&)>;
using Projection = std::function<DenseVector(const DenseVector&)>;

// One BLO instance as an oracle bundle. grad_g_y may return a subgradient;
// the selection at kinks is instance data and must be deterministic.
struct BilevelProblem {
  std::string name;
  int d_x = 0;
  int d_y = 0;
  ValueOracle f_val, g_val;
  GradOracle2 grad_f_x, grad_f_y, grad_g_x, grad_g_y;
  Projection project_y;  // identity when the LL set is all of R^{d_y}
  bool y_unconstrained = true;
  SmoothnessConstants constants;
  GroundTruth truth;
};

// Tallies of oracle queries. jv_g and hv_g stay zero for every solver here;
// they exist so the fully-first-order claim is checkable, not checked-by-
// construction only in prose.
struct OracleCounter {
  std::uint64_t gc_f = 0, gc_g = 0;
  std::uint64_t jv_g = 0, hv_g = 0;
  std::uint64_t proj = 0;
  std::uint64_t val_f = 0, val_g = 0;
  std::uint64_t zo_phi = 0;

  OracleCounter& operator+=(const OracleCounter& o) {
    gc_f += o.gc_f;
    gc_g += o.gc_g;
    jv_g += o.jv_g;
    hv_g += o.hv_g;
    proj += o.proj;
    val_f += o.val_f;
    val_g += o.val_g;
    zo_phi += o.zo_phi;
    return *this;
  }
  friend bool operator==(const OracleCounter&, const OracleCounter&) = default;
};

// Projection onto the closed ball ||v - center|| <= radius.
DenseVector project_ball(const DenseVector& v, const DenseVector& center, double radius);

// Coordinate-wise clamp onto [lo, hi].
DenseVector project_box(const DenseVector& v, const DenseVector& lo,
                        const DenseVector& hi);

// (y - P_Y(y - eta * grad_g_y(x, y))) / eta; reduces to grad_g_y when the LL
// set is unconstrained.
DenseVector generalized_gradient(const BilevelProblem& p, const DenseVector& x,
                                 const DenseVector& y, double eta);

// Counting + fail-fast wrapper around a problem's oracles. Every solver goes
// through this: counters match closure invocations by construction, and a
// NaN/Inf from any oracle aborts the run with the offending iterate.
class CountedProblem {
 public:
  CountedProblem(const BilevelProblem& p, OracleCounter& c) : p_(&p), c_(&c) {}

  const BilevelProblem& problem() const { return *p_; }
  OracleCounter& counter() const { return *c_; }

  double f(const DenseVector& x, const DenseVector& y) const {
    ++c_->val_f;
    return checked_scalar(p_->f_val(x, y), "f", x, y);
  }
  double g(const DenseVector& x, const DenseVector& y) const {
    ++c_->val_g;
    return checked_scalar(p_->g_val(x, y), "g", x, y);
  }
  DenseVector gfx(const DenseVector& x, const DenseVector& y) const {
    ++c_->gc_f;
    return checked_vec(p_->grad_f_x(x, y), p_->d_x, "grad_f_x", x, y);
  }
  DenseVector gfy(const DenseVector& x, const DenseVector& y) const {
    ++c_->gc_f;
    return checked_vec(p_->grad_f_y(x, y), p_->d_y, "grad_f_y", x, y);
  }
  DenseVector ggx(const DenseVector& x, const DenseVector& y) const {
    ++c_->gc_g;
    return checked_vec(p_->grad_g_x(x, y), p_->d_x, "grad_g_x", x, y);
  }
  DenseVector ggy(const DenseVector& x, const DenseVector& y) const {
    ++c_->gc_g;
    return checked_vec(p_->grad_g_y(x, y), p_->d_y, "grad_g_y", x, y);
  }
  DenseVector project(const DenseVector& v) const {
    ++c_->proj;
    if (!p_->project_y) return v;
    return checked_vec(p_->project_y(v), p_->d_y, "project_y", v, v);
  }

 private:
  static double checked_scalar(double v, const char* oracle, const DenseVector& x,
                               const DenseVector& y);
  static DenseVector checked_vec(DenseVector v, int want_dim, const char* oracle,
                                 const DenseVector& x, const DenseVector& y);

  const BilevelProblem* p_;
  OracleCounter* c_;
};

}  // namespace bilevel
