#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bilevel/core.hpp"
#include "bilevel/linalg.hpp"
#include "bilevel/pragda.hpp"

namespace bilevel {

// ---------------------------------------------------------------------------
// Quadratic bilevel family
//   g(x,y) = 1/2 y'Ay - y'(Bx + b0)          (A symmetric positive definite)
//   f(x,y) = 1/2 x'Qx + c'x + p'y + 1/2 y'Sy + y'Cx
// Everything about it is a small linear solve, which is exactly why it serves
// as the analytically tractable family: the LL solution, the hyper-objective,
// its gradient via the implicit-function route, and the penalized inner
// solutions all have closed forms the tests freeze against.
// ---------------------------------------------------------------------------
class QuadraticBlo {
 public:
  struct Data {
    Mat a, b, q, s, c_cross;  // s and c_cross may be empty (zero)
    DenseVector b0, c_lin, p_lin;
    Mat chol_a, chol_q;  // chol_q empty when Q is not PD
    SmoothnessConstants constants;
  };

  explicit QuadraticBlo(Data d);

  const Data& data() const { return *d_; }
  const SmoothnessConstants& constants() const { return d_->constants; }
  int d_x() const { return static_cast<int>(d_->q.rows()); }
  int d_y() const { return static_cast<int>(d_->a.rows()); }

  DenseVector y_star(const DenseVector& x) const;
  // argmin_y f(x,y) + lambda*g(x,y)
  DenseVector y_star_penalized(const DenseVector& x, double lambda) const;
  double phi(const DenseVector& x) const;
  // Implicit-function route: grad_x f - (mixed Hessian)(LL Hessian)^{-1} grad_y f.
  DenseVector grad_phi(const DenseVector& x) const;
  double lstar(const DenseVector& x, double lambda) const;
  DenseVector grad_lstar(const DenseVector& x, double lambda) const;
  double f(const DenseVector& x, const DenseVector& y) const;
  double g(const DenseVector& x, const DenseVector& y) const;

  BilevelProblem as_problem(const std::string& name = "quadratic") const;

 private:
  std::shared_ptr<const Data> d_;
};

// Random instance with controlled LL conditioning: A has spectrum [1, cond],
// B singular values in [0.3, 1], Q spectrum [0.5, 1.5]; f linear in y.
QuadraticBlo make_quadratic(int d_x, int d_y, Rng& rng, double conditioning);

// Canonical fixed instance: A = I, B = I, Q = I, b0 = 0, c = 0, p = 0.5*ones.
QuadraticBlo make_quadratic_unit(int d);

// ---------------------------------------------------------------------------
// W-shaped minimax instance: fbar(x,y) = w(x3) - 10 y1^2 + x1 y1 - 5 y2^2 +
// x2 y2 with the piecewise-cubic w below. phibar(x) = w(x3) + x1^2/40 +
// x2^2/20; the origin is a strict saddle (w''(0) = -0.2) and the two symmetric
// outer vertices are the minima.
// ---------------------------------------------------------------------------
double wshape_w(double x);
double wshape_w1(double x);   // first derivative
double wshape_w2(double x);   // second derivative
double wshape_sqrt_eps();     // 0.1
double wshape_big_l();        // 5
MinimaxProblem make_wshape();

// ---------------------------------------------------------------------------
// Worst-case chain instances: any span-respecting first-order method that
// starts at the origin activates at most one new coordinate per step, so K
// steps cannot see the back half of the coordinates and the UL value stays a
// constant 1/4 away from the hyper-objective value.
// ---------------------------------------------------------------------------
enum class ZeroChainVariant { smooth, lipschitz };
BilevelProblem make_zero_chain(ZeroChainVariant variant, int big_k);

// PL lower level on a box: f = (x - y2)^2 + (y1 - 1)^2, g = y1^2 - 2 x y1,
// Y = [0.95, 1.05]^2; phi(x) = (x-1)^2 for x inside the box interval.
BilevelProblem make_pl_remark2();

// Discontinuous hyper-objective: f = x^2 + y, g = -x y on [-1, 1];
// phi(x) = x^2 + sign(x). Diagnostics target only.
BilevelProblem make_ex41();

// Nonsmooth hyper-objective: f = x y, g = 0 on [-1, 1]; phi(x) = -|x|.
BilevelProblem make_ex51();

// Adversarial least-squares generator: f = 1/(2n)||Ax - y||^2 and a weighted
// ridge lower level whose weight matrix has a zero block, so the LL solution
// set is a non-singleton affine set. Desk-scale stand-in for the data-driven
// experiment.
BilevelProblem make_adv_least_squares(int n, int d_x, double lam_reg, Rng& rng,
                                      double sigma_min_pos = 0.1, double sigma_max = 1.0);

// Pinned regularized-lower-level failure pair: the unregularized
// hyper-objective is -x^2 while any positive LL regularization collapses the
// solution set to a point and turns it into a linear function.
struct RegularizationDemo {
  double lambda_reg = 0.0;
  double pivot_y1 = 0.0;
  std::string case_name;           // "pivot_nonzero" or "pivot_zero"
  std::vector<double> grid;        // x values
  std::vector<double> phi;         // -x^2
  std::vector<double> phi_reg;     // linear
  std::string phi_reg_formula;
};
RegularizationDemo regularization_failure_demo(double lambda_reg, double pivot_y1 = 1.0);

// ---------------------------------------------------------------------------
// Registry for the CLI.
// ---------------------------------------------------------------------------
struct BuiltProblem {
  std::optional<BilevelProblem> blo;
  std::optional<MinimaxProblem> minimax;
  bool demo_only = false;
};

using ProblemParams = std::map<std::string, double>;

struct ProblemInfo {
  std::string id;
  std::string summary;
};

const std::vector<ProblemInfo>& problem_registry();
bool is_known_problem(const std::string& id);
BuiltProblem build_problem(const std::string& id, const ProblemParams& params,
                           std::uint64_t seed);

}  // namespace bilevel
