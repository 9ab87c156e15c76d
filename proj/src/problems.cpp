#include "bilevel/problems.hpp"

#include <algorithm>
#include <cmath>

namespace bilevel {

// ---------------------------------------------------------------------------
// Quadratic family
// ---------------------------------------------------------------------------

QuadraticBlo::QuadraticBlo(Data d) : d_(nullptr) {
  if (d.a.rows() != d.a.cols()) throw ContractViolation("QuadraticBlo: A must be square");
  if (d.b.rows() != d.a.rows() || d.b.cols() != d.q.rows())
    throw ContractViolation("QuadraticBlo: B must be d_y x d_x");
  d.chol_a = cholesky(d.a);
  if (!d.q.empty()) {
    try {
      d.chol_q = cholesky(d.q);
    } catch (const NumericError&) {
      d.chol_q = Mat();
    }
  }
  d_ = std::make_shared<const Data>(std::move(d));
}

DenseVector QuadraticBlo::y_star(const DenseVector& x) const {
  DenseVector rhs = matvec(d_->b, x) + d_->b0;
  return cholesky_solve(d_->chol_a, rhs);
}

DenseVector QuadraticBlo::y_star_penalized(const DenseVector& x, double lambda) const {
  const std::size_t n = d_->a.rows();
  Mat m = d_->a;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) *= lambda;
      if (!d_->s.empty()) m(i, j) += d_->s(i, j);
    }
  DenseVector rhs = matvec(d_->b, x) + d_->b0;
  rhs = lambda * rhs;
  rhs.axpy_in(-1.0, d_->p_lin);
  if (!d_->c_cross.empty()) rhs.axpy_in(-1.0, matvec(d_->c_cross, x));
  return cholesky_solve(cholesky(m), rhs);
}

double QuadraticBlo::f(const DenseVector& x, const DenseVector& y) const {
  double v = 0.5 * x.dot(matvec(d_->q, x)) + d_->c_lin.dot(x) + d_->p_lin.dot(y);
  if (!d_->s.empty()) v += 0.5 * y.dot(matvec(d_->s, y));
  if (!d_->c_cross.empty()) v += y.dot(matvec(d_->c_cross, x));
  return v;
}

double QuadraticBlo::g(const DenseVector& x, const DenseVector& y) const {
  DenseVector m = matvec(d_->b, x) + d_->b0;
  return 0.5 * y.dot(matvec(d_->a, y)) - y.dot(m);
}

double QuadraticBlo::phi(const DenseVector& x) const { return f(x, y_star(x)); }

DenseVector QuadraticBlo::grad_phi(const DenseVector& x) const {
  const DenseVector ys = y_star(x);
  DenseVector gx = matvec(d_->q, x) + d_->c_lin;
  if (!d_->c_cross.empty()) gx.axpy_in(1.0, matvec_t(d_->c_cross, ys));
  DenseVector gy = d_->p_lin;
  if (!d_->s.empty()) gy.axpy_in(1.0, matvec(d_->s, ys));
  if (!d_->c_cross.empty()) gy.axpy_in(1.0, matvec(d_->c_cross, x));
  // mixed LL Hessian is -B', LL Hessian is A: correction is +B'A^{-1} grad_y f
  gx.axpy_in(1.0, matvec_t(d_->b, cholesky_solve(d_->chol_a, gy)));
  return gx;
}

double QuadraticBlo::lstar(const DenseVector& x, double lambda) const {
  const DenseVector yl = y_star_penalized(x, lambda);
  const DenseVector z = y_star(x);
  return f(x, yl) + lambda * (g(x, yl) - g(x, z));
}

DenseVector QuadraticBlo::grad_lstar(const DenseVector& x, double lambda) const {
  const DenseVector yl = y_star_penalized(x, lambda);
  const DenseVector z = y_star(x);
  DenseVector gx = matvec(d_->q, x) + d_->c_lin;
  if (!d_->c_cross.empty()) gx.axpy_in(1.0, matvec_t(d_->c_cross, yl));
  gx.axpy_in(lambda, matvec_t(d_->b, z - yl));
  return gx;
}

BilevelProblem QuadraticBlo::as_problem(const std::string& name) const {
  BilevelProblem p;
  p.name = name;
  p.d_x = d_x();
  p.d_y = d_y();
  QuadraticBlo self = *this;
  p.f_val = [self](const DenseVector& x, const DenseVector& y) { return self.f(x, y); };
  p.g_val = [self](const DenseVector& x, const DenseVector& y) { return self.g(x, y); };
  p.grad_f_x = [self](const DenseVector& x, const DenseVector& y) {
    DenseVector g = matvec(self.d_->q, x) + self.d_->c_lin;
    if (!self.d_->c_cross.empty()) g.axpy_in(1.0, matvec_t(self.d_->c_cross, y));
    return g;
  };
  p.grad_f_y = [self](const DenseVector& x, const DenseVector& y) {
    DenseVector g = self.d_->p_lin;
    if (!self.d_->s.empty()) g.axpy_in(1.0, matvec(self.d_->s, y));
    if (!self.d_->c_cross.empty()) g.axpy_in(1.0, matvec(self.d_->c_cross, x));
    return g;
  };
  p.grad_g_x = [self](const DenseVector& x, const DenseVector& y) {
    (void)x;
    return -1.0 * matvec_t(self.d_->b, y);
  };
  p.grad_g_y = [self](const DenseVector& x, const DenseVector& y) {
    DenseVector g = matvec(self.d_->a, y);
    g.axpy_in(-1.0, matvec(self.d_->b, x) + self.d_->b0);
    return g;
  };
  p.project_y = nullptr;
  p.y_unconstrained = true;
  p.constants = d_->constants;

  GroundTruth t;
  t.y_star = [self](const DenseVector& x) { return self.y_star(x); };
  t.phi = [self](const DenseVector& x) { return self.phi(x); };
  t.grad_phi = [self](const DenseVector& x) { return self.grad_phi(x); };
  t.g_star = [self](const DenseVector& x) { return self.g(x, self.y_star(x)); };
  if (d_->s.empty() && d_->c_cross.empty() && !d_->chol_q.empty()) {
    // grad phi = Qx + c + B'A^{-1}p is affine; the minimizer is explicit.
    DenseVector shift = matvec_t(d_->b, cholesky_solve(d_->chol_a, d_->p_lin));
    shift.axpy_in(1.0, d_->c_lin);
    DenseVector xs = cholesky_solve(d_->chol_q, -1.0 * shift);
    t.x_star = xs;
    t.phi_star = phi(xs);
    const Mat q = d_->q;
    t.hess_phi = [q](const DenseVector&) {
      std::vector<double> h(q.rows() * q.cols());
      for (std::size_t i = 0; i < q.rows(); ++i)
        for (std::size_t j = 0; j < q.cols(); ++j) h[i * q.cols() + j] = q(i, j);
      return h;
    };
  }
  p.truth = std::move(t);
  return p;
}

QuadraticBlo make_quadratic(int d_x, int d_y, Rng& rng, double conditioning) {
  if (d_x < 1 || d_y < 1) throw ContractViolation("make_quadratic: dims must be >= 1");
  if (conditioning < 1.0) throw ContractViolation("make_quadratic: conditioning must be >= 1");
  const auto nx = static_cast<std::size_t>(d_x);
  const auto ny = static_cast<std::size_t>(d_y);

  const Mat u = random_orthogonal(rng, ny);
  Mat a(ny, ny, 0.0);
  for (std::size_t r = 0; r < ny; ++r) {
    const double eig = ny == 1 ? conditioning
                               : 1.0 + (conditioning - 1.0) * static_cast<double>(r) /
                                           static_cast<double>(ny - 1);
    for (std::size_t i = 0; i < ny; ++i)
      for (std::size_t j = 0; j < ny; ++j) a(i, j) += eig * u(i, r) * u(j, r);
  }
  const Mat v = random_orthogonal(rng, ny);
  const Mat w = random_orthogonal(rng, nx);
  Mat b(ny, nx, 0.0);
  const std::size_t nsv = std::min(nx, ny);
  for (std::size_t r = 0; r < nsv; ++r) {
    const double sv = 0.3 + 0.7 * rng.uniform01();
    for (std::size_t i = 0; i < ny; ++i)
      for (std::size_t j = 0; j < nx; ++j) b(i, j) += sv * v(i, r) * w(j, r);
  }
  const Mat ux = random_orthogonal(rng, nx);
  Mat q(nx, nx, 0.0);
  for (std::size_t r = 0; r < nx; ++r) {
    const double eig = nx == 1 ? 1.0
                               : 0.5 + static_cast<double>(r) / static_cast<double>(nx - 1);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < nx; ++j) q(i, j) += eig * ux(i, r) * ux(j, r);
  }

  QuadraticBlo::Data d;
  d.a = a;
  d.b = b;
  d.q = q;
  d.b0 = DenseVector(ny);
  for (std::size_t i = 0; i < ny; ++i) d.b0[i] = rng.uniform(-1.0, 1.0);
  d.c_lin = DenseVector(nx);
  for (std::size_t i = 0; i < nx; ++i) d.c_lin[i] = rng.uniform(-1.0, 1.0);
  d.p_lin = sample_unit_sphere(rng, d_y);  // so the value-Lipschitz modulus is exactly 1

  SmoothnessConstants c;
  c.mu = 1.0;
  c.ell = std::max(1.5, conditioning + 1.0);  // ||A|| + ||B|| bounds the LL block
  c.big_m = 1.0;
  c.rho = 0.0;
  c.nu3 = 0.0;
  d.constants = c;
  return QuadraticBlo(std::move(d));
}

QuadraticBlo make_quadratic_unit(int d) {
  if (d < 1) throw ContractViolation("make_quadratic_unit: d must be >= 1");
  const auto n = static_cast<std::size_t>(d);
  QuadraticBlo::Data data;
  data.a = Mat::identity(n);
  data.b = Mat::identity(n);
  data.q = Mat::identity(n);
  data.b0 = DenseVector(n, 0.0);
  data.c_lin = DenseVector(n, 0.0);
  data.p_lin = DenseVector(n, 0.5);
  SmoothnessConstants c;
  c.mu = 1.0;
  c.ell = 2.0;  // ||A|| + ||B||
  c.big_m = data.p_lin.norm();
  data.constants = c;
  return QuadraticBlo(std::move(data));
}

// ---------------------------------------------------------------------------
// W-shaped minimax instance
// ---------------------------------------------------------------------------

namespace {
// Constants are derived from s = sqrt(eps) so all branch values glue exactly:
// eps = s^2 and eps^(3/2) = s^3 are computed from the same s.
constexpr double kS = 0.1;                    // sqrt(eps)
constexpr double kL = 5.0;
const double kEps = kS * kS;
const double kE32 = kS * kS * kS;
const double kBp1 = kL * kS;                  // inner breakpoint 0.5
const double kBp2 = (kL + 1.0) * kS;          // vertex 0.6
const double kTail = (3.0 * kL + 1.0) * kE32 / 3.0;
}  // namespace

double wshape_sqrt_eps() { return kS; }
double wshape_big_l() { return kL; }

double wshape_w(double x) {
  if (x <= -kBp1) {
    const double t = x + kBp2;
    return kS * t * t - t * t * t / 3.0 - kTail;
  }
  if (x <= -kS) return kEps * x + kE32 / 3.0;
  if (x <= 0.0) return -kS * x * x - x * x * x / 3.0;
  if (x <= kS) return -kS * x * x + x * x * x / 3.0;
  if (x <= kBp1) return -kEps * x + kE32 / 3.0;
  const double t = x - kBp2;
  return kS * t * t + t * t * t / 3.0 - kTail;
}

double wshape_w1(double x) {
  if (x <= -kBp1) {
    const double t = x + kBp2;
    return 2.0 * kS * t - t * t;
  }
  if (x <= -kS) return kEps;
  if (x <= 0.0) return -2.0 * kS * x - x * x;
  if (x <= kS) return -2.0 * kS * x + x * x;
  if (x <= kBp1) return -kEps;
  const double t = x - kBp2;
  return 2.0 * kS * t + t * t;
}

double wshape_w2(double x) {
  if (x <= -kBp1) return 2.0 * kS - 2.0 * (x + kBp2);
  if (x <= -kS) return 0.0;
  if (x <= 0.0) return -2.0 * kS - 2.0 * x;
  if (x <= kS) return -2.0 * kS + 2.0 * x;
  if (x <= kBp1) return 0.0;
  return 2.0 * kS + 2.0 * (x - kBp2);
}

MinimaxProblem make_wshape() {
  MinimaxProblem p;
  p.name = "wshape";
  p.d_x = 3;
  p.d_y = 2;
  p.fbar_val = [](const DenseVector& x, const DenseVector& y) {
    return wshape_w(x[2]) - 10.0 * y[0] * y[0] + x[0] * y[0] - 5.0 * y[1] * y[1] +
           x[1] * y[1];
  };
  p.grad_fbar_x = [](const DenseVector& x, const DenseVector& y) {
    return DenseVector{y[0], y[1], wshape_w1(x[2])};
  };
  p.grad_fbar_y = [](const DenseVector& x, const DenseVector& y) {
    return DenseVector{-20.0 * y[0] + x[0], -10.0 * y[1] + x[1]};
  };
  SmoothnessConstants c;
  c.ell = 21.0;  // covers the y-curvature, the unit couplings, and |w''| <= 2 near the vertices
  c.mu = 10.0;
  c.rho = 2.0;   // |w'''| <= 2
  c.big_m = 5.0;
  p.constants = c;

  GroundTruth t;
  t.phi = [](const DenseVector& x) {
    return wshape_w(x[2]) + x[0] * x[0] / 40.0 + x[1] * x[1] / 20.0;
  };
  t.grad_phi = [](const DenseVector& x) {
    return DenseVector{x[0] / 20.0, x[1] / 10.0, wshape_w1(x[2])};
  };
  t.hess_phi = [](const DenseVector& x) {
    std::vector<double> h(9, 0.0);
    h[0] = 1.0 / 20.0;
    h[4] = 1.0 / 10.0;
    h[8] = wshape_w2(x[2]);
    return h;
  };
  t.y_star = [](const DenseVector& x) {
    return DenseVector{x[0] / 20.0, x[1] / 10.0};
  };
  t.x_star = DenseVector{0.0, 0.0, kBp2};
  t.phi_star = -kTail;
  p.truth = std::move(t);
  return p;
}

// ---------------------------------------------------------------------------
// Worst-case chain instances
// ---------------------------------------------------------------------------

BilevelProblem make_zero_chain(ZeroChainVariant variant, int big_k) {
  if (big_k < 1) throw ContractViolation("make_zero_chain: big_k must be >= 1");
  const int q = 2 * big_k;
  const auto nq = static_cast<std::size_t>(q);
  const double sq = std::sqrt(static_cast<double>(q));

  BilevelProblem p;
  p.d_x = 1;
  p.d_y = q;
  p.project_y = nullptr;
  p.y_unconstrained = true;
  p.grad_f_x = [](const DenseVector&, const DenseVector&) { return DenseVector{0.0}; };
  p.grad_g_x = [](const DenseVector&, const DenseVector&) { return DenseVector{0.0}; };

  GroundTruth t;
  t.phi = [](const DenseVector&) { return 0.25; };
  t.grad_phi = [](const DenseVector&) { return DenseVector{0.0}; };
  t.phi_star = 0.25;

  if (variant == ZeroChainVariant::smooth) {
    p.name = "zerochain-smooth";
    const double sigma = 1.0 / sq;
    const int k = big_k;
    p.f_val = [k, q](const DenseVector&, const DenseVector& y) {
      double v = 0.0;
      for (int j = k; j < q; ++j) v += y[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
      return 0.5 * v;
    };
    p.grad_f_y = [k, q, nq](const DenseVector&, const DenseVector& y) {
      DenseVector g(nq, 0.0);
      for (int j = k; j < q; ++j) g[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(j)];
      return g;
    };
    p.g_val = [sigma, nq](const DenseVector&, const DenseVector& y) {
      double v = (y[0] - sigma) * (y[0] - sigma);
      for (std::size_t j = 0; j + 1 < nq; ++j) v += (y[j + 1] - y[j]) * (y[j + 1] - y[j]);
      return 0.125 * v;
    };
    p.grad_g_y = [sigma, nq](const DenseVector&, const DenseVector& y) {
      DenseVector g(nq, 0.0);
      g[0] = 0.25 * (y[0] - sigma);
      for (std::size_t j = 0; j + 1 < nq; ++j) {
        const double d = 0.25 * (y[j + 1] - y[j]);
        g[j] -= d;
        g[j + 1] += d;
      }
      return g;
    };
    t.y_star = [sigma, nq](const DenseVector&) { return DenseVector(nq, sigma); };
    t.g_star = [](const DenseVector&) { return 0.0; };
    SmoothnessConstants c;
    c.ell = 1.0;
    p.constants = c;
  } else {
    p.name = "zerochain-lip";
    const double beta = 1.0 / sq;
    const double c_max = sq / (2.0 + sq);
    const double c_reg = 1.0 / (2.0 + sq);
    const int k = big_k;
    const auto huber = [beta](double v) {
      if (v >= beta) return beta * v - 0.5 * beta * beta;
      if (v <= -beta) return -beta * v - 0.5 * beta * beta;
      return 0.5 * v * v;
    };
    const auto huber_d = [beta](double v) {
      if (v >= beta) return beta;
      if (v <= -beta) return -beta;
      return v;
    };
    p.f_val = [k, q, huber](const DenseVector&, const DenseVector& y) {
      double v = 0.0;
      for (int j = k; j < q; ++j) v += huber(y[static_cast<std::size_t>(j)]);
      return v;
    };
    p.grad_f_y = [k, q, nq, huber_d](const DenseVector&, const DenseVector& y) {
      DenseVector g(nq, 0.0);
      for (int j = k; j < q; ++j)
        g[static_cast<std::size_t>(j)] = huber_d(y[static_cast<std::size_t>(j)]);
      return g;
    };
    p.g_val = [c_max, c_reg, nq](const DenseVector&, const DenseVector& y) {
      double m = y[0];
      for (std::size_t j = 1; j < nq; ++j) m = std::max(m, y[j]);
      double v = 0.0;
      for (std::size_t j = 0; j < nq; ++j) v += y[j] * y[j];
      return c_max * m + 0.5 * c_reg * v;
    };
    // Adversarial subgradient selection: the smallest maximizing index of the
    // max term, which never activates coordinates past the chain front.
    p.grad_g_y = [c_max, c_reg, nq](const DenseVector&, const DenseVector& y) {
      std::size_t jstar = 0;
      for (std::size_t j = 1; j < nq; ++j)
        if (y[j] > y[jstar]) jstar = j;
      DenseVector g = c_reg * y;
      g[jstar] += c_max;
      return g;
    };
    t.y_star = [beta, nq](const DenseVector&) { return DenseVector(nq, -beta); };
    t.g_star = [c_reg](const DenseVector&) { return -0.5 * c_reg; };
    SmoothnessConstants c;
    c.c_f = 1.0;
    c.c_g = 1.0;
    p.constants = c;
  }
  p.truth = std::move(t);
  return p;
}

// ---------------------------------------------------------------------------
// Sharp instances
// ---------------------------------------------------------------------------

namespace {
constexpr double kPlLo = 0.95;
constexpr double kPlHi = 1.05;

double clamp1(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }
}  // namespace

BilevelProblem make_pl_remark2() {
  BilevelProblem p;
  p.name = "pl-remark2";
  p.d_x = 1;
  p.d_y = 2;
  p.f_val = [](const DenseVector& x, const DenseVector& y) {
    return (x[0] - y[1]) * (x[0] - y[1]) + (y[0] - 1.0) * (y[0] - 1.0);
  };
  p.grad_f_x = [](const DenseVector& x, const DenseVector& y) {
    return DenseVector{2.0 * (x[0] - y[1])};
  };
  p.grad_f_y = [](const DenseVector& x, const DenseVector& y) {
    return DenseVector{2.0 * (y[0] - 1.0), 2.0 * (y[1] - x[0])};
  };
  p.g_val = [](const DenseVector& x, const DenseVector& y) {
    return y[0] * y[0] - 2.0 * x[0] * y[0];
  };
  p.grad_g_x = [](const DenseVector&, const DenseVector& y) {
    return DenseVector{-2.0 * y[0]};
  };
  p.grad_g_y = [](const DenseVector& x, const DenseVector& y) {
    return DenseVector{2.0 * y[0] - 2.0 * x[0], 0.0};
  };
  const DenseVector lo{kPlLo, kPlLo};
  const DenseVector hi{kPlHi, kPlHi};
  p.project_y = [lo, hi](const DenseVector& v) { return project_box(v, lo, hi); };
  p.y_unconstrained = false;

  SmoothnessConstants c;
  c.ell = 2.0;
  c.sharp_mod = 2.0;
  c.big_m = 0.36;
  c.c_f = 0.36;  // y-section bound on the box for UL points within 0.15 of 1
  c.c_g = 0.3;
  c.radius_r = 0.1 * std::sqrt(2.0);
  c.hoelder = {2.0, 2.0};
  p.constants = c;

  GroundTruth t;
  t.phi = [](const DenseVector& x) {
    const double yc = clamp1(x[0], kPlLo, kPlHi);
    return (x[0] - yc) * (x[0] - yc) + (yc - 1.0) * (yc - 1.0);
  };
  t.grad_phi = [](const DenseVector& x) {
    if (x[0] >= kPlLo && x[0] <= kPlHi) return DenseVector{2.0 * (x[0] - 1.0)};
    const double yc = clamp1(x[0], kPlLo, kPlHi);
    return DenseVector{2.0 * (x[0] - yc)};
  };
  t.y_star = [](const DenseVector& x) {
    const double yc = clamp1(x[0], kPlLo, kPlHi);
    return DenseVector{yc, yc};
  };
  t.g_star = [](const DenseVector& x) {
    const double yc = clamp1(x[0], kPlLo, kPlHi);
    return yc * yc - 2.0 * x[0] * yc;
  };
  t.x_star = DenseVector{1.0};
  t.phi_star = 0.0;
  t.nonsmooth = true;  // phi has kinks where the box clamp engages
  t.fd_region = {{DenseVector{1.0}, 0.04}};
  p.truth = std::move(t);
  return p;
}

BilevelProblem make_ex41() {
  BilevelProblem p;
  p.name = "ex41";
  p.d_x = 1;
  p.d_y = 1;
  p.f_val = [](const DenseVector& x, const DenseVector& y) { return x[0] * x[0] + y[0]; };
  p.grad_f_x = [](const DenseVector& x, const DenseVector&) {
    return DenseVector{2.0 * x[0]};
  };
  p.grad_f_y = [](const DenseVector&, const DenseVector&) { return DenseVector{1.0}; };
  p.g_val = [](const DenseVector& x, const DenseVector& y) { return -x[0] * y[0]; };
  p.grad_g_x = [](const DenseVector&, const DenseVector& y) { return DenseVector{-y[0]}; };
  p.grad_g_y = [](const DenseVector& x, const DenseVector&) { return DenseVector{-x[0]}; };
  const DenseVector lo{-1.0}, hi{1.0};
  p.project_y = [lo, hi](const DenseVector& v) { return project_box(v, lo, hi); };
  p.y_unconstrained = false;

  SmoothnessConstants c;
  c.ell = 1.0;
  c.c_f = 3.0;
  c.c_g = 1.0;
  c.radius_r = 2.0;
  p.constants = c;

  const auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  GroundTruth t;
  t.phi = [sgn](const DenseVector& x) { return x[0] * x[0] + sgn(x[0]); };
  t.grad_phi = [](const DenseVector& x) { return DenseVector{2.0 * x[0]}; };
  t.y_star = [sgn](const DenseVector& x) { return DenseVector{sgn(x[0])}; };
  t.g_star = [](const DenseVector& x) { return -std::abs(x[0]); };
  t.nonsmooth = true;  // discontinuous at 0
  t.fd_region = {{DenseVector{0.5}, 0.4}};
  p.truth = std::move(t);
  return p;
}

BilevelProblem make_ex51() {
  BilevelProblem p;
  p.name = "ex51";
  p.d_x = 1;
  p.d_y = 1;
  p.f_val = [](const DenseVector& x, const DenseVector& y) { return x[0] * y[0]; };
  p.grad_f_x = [](const DenseVector&, const DenseVector& y) { return DenseVector{y[0]}; };
  p.grad_f_y = [](const DenseVector& x, const DenseVector&) { return DenseVector{x[0]}; };
  p.g_val = [](const DenseVector&, const DenseVector&) { return 0.0; };
  p.grad_g_x = [](const DenseVector&, const DenseVector&) { return DenseVector{0.0}; };
  p.grad_g_y = [](const DenseVector&, const DenseVector&) { return DenseVector{0.0}; };
  const DenseVector lo{-1.0}, hi{1.0};
  p.project_y = [lo, hi](const DenseVector& v) { return project_box(v, lo, hi); };
  p.y_unconstrained = false;

  SmoothnessConstants c;
  c.ell = 0.0;
  c.sharp_mod = 1.0;  // the LL solution set is the whole box, distance is zero
  c.c_f = std::sqrt(2.0);
  c.c_g = 0.0;
  c.radius_r = 2.0;
  c.hoelder = {1.0, 1.0};
  p.constants = c;

  const auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  GroundTruth t;
  t.phi = [](const DenseVector& x) { return -std::abs(x[0]); };
  t.grad_phi = [sgn](const DenseVector& x) { return DenseVector{-sgn(x[0])}; };
  t.y_star = [sgn](const DenseVector& x) { return DenseVector{x[0] == 0.0 ? 0.0 : -sgn(x[0])}; };
  t.g_star = [](const DenseVector&) { return 0.0; };
  t.nonsmooth = true;
  t.fd_region = {{DenseVector{0.5}, 0.4}};
  p.truth = std::move(t);
  return p;
}

// ---------------------------------------------------------------------------
// Adversarial least squares
// ---------------------------------------------------------------------------

BilevelProblem make_adv_least_squares(int n, int d_x, double lam_reg, Rng& rng,
                                      double sigma_min_pos, double sigma_max) {
  if (n < 2 || d_x < 1) throw ContractViolation("make_adv_least_squares: bad dims");
  if (n > 200 || d_x > 50)
    throw ContractViolation("make_adv_least_squares: generator is desk-scale (n<=200, d_x<=50)");
  if (lam_reg <= 0.0 || sigma_min_pos <= 0.0 || sigma_max < sigma_min_pos)
    throw ContractViolation("make_adv_least_squares: bad weights");
  const auto nn = static_cast<std::size_t>(n);
  const auto nx = static_cast<std::size_t>(d_x);

  // Feature/label scaling keeps the derived Lipschitz bounds near unity so
  // the switching-gradient schedules stay desk-scale on this generator.
  auto a = std::make_shared<Mat>(nn, nx);
  double a_fro2 = 0.0;
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nx; ++j) {
      (*a)(i, j) = rng.normal() / std::sqrt(static_cast<double>(n * d_x));
      a_fro2 += (*a)(i, j) * (*a)(i, j);
    }
  auto b_lbl = std::make_shared<DenseVector>(nn);
  for (std::size_t i = 0; i < nn; ++i) (*b_lbl)[i] = 0.3 * rng.normal();
  // Half of the weights evenly spaced in [sigma_min_pos, sigma_max], half zero.
  auto m_diag = std::make_shared<DenseVector>(nn, 0.0);
  const std::size_t n_pos = nn / 2;
  for (std::size_t i = 0; i < n_pos; ++i)
    (*m_diag)[i] = n_pos == 1 ? sigma_max
                              : sigma_min_pos + (sigma_max - sigma_min_pos) *
                                                    static_cast<double>(i) /
                                                    static_cast<double>(n_pos - 1);

  const double inv_n = 1.0 / static_cast<double>(n);
  const double lam = lam_reg;
  const double a_fro = std::sqrt(a_fro2);
  const double x_region = 2.0;
  const double y_radius = b_lbl->norm() + a_fro * x_region + 2.0;
  const DenseVector y_center = *b_lbl;

  BilevelProblem p;
  p.name = "advls";
  p.d_x = d_x;
  p.d_y = n;
  p.f_val = [a, inv_n](const DenseVector& x, const DenseVector& y) {
    DenseVector r = matvec(*a, x) - y;
    return 0.5 * inv_n * r.squared_norm();
  };
  p.grad_f_x = [a, inv_n](const DenseVector& x, const DenseVector& y) {
    DenseVector r = matvec(*a, x) - y;
    return inv_n * matvec_t(*a, r);
  };
  p.grad_f_y = [a, inv_n](const DenseVector& x, const DenseVector& y) {
    DenseVector r = matvec(*a, x) - y;
    return (-inv_n) * r;
  };
  p.g_val = [a, b_lbl, m_diag, inv_n, lam](const DenseVector& x, const DenseVector& y) {
    DenseVector r = matvec(*a, x) - y;
    double v = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double dy = y[i] - (*b_lbl)[i];
      v += (*m_diag)[i] * (r[i] * r[i] + lam * dy * dy);
    }
    return 0.5 * inv_n * v;
  };
  p.grad_g_x = [a, m_diag, inv_n](const DenseVector& x, const DenseVector& y) {
    DenseVector r = matvec(*a, x) - y;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] *= (*m_diag)[i];
    return inv_n * matvec_t(*a, r);
  };
  p.grad_g_y = [a, b_lbl, m_diag, inv_n, lam](const DenseVector& x, const DenseVector& y) {
    DenseVector r = matvec(*a, x) - y;
    DenseVector g(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      g[i] = inv_n * (*m_diag)[i] * (-r[i] + lam * (y[i] - (*b_lbl)[i]));
    return g;
  };
  p.project_y = [y_center, y_radius](const DenseVector& v) {
    return project_ball(v, y_center, y_radius);
  };
  p.y_unconstrained = false;

  SmoothnessConstants c;
  c.ell = (lam + 1.0) * sigma_max;
  c.sharp_mod = (lam + 1.0) * sigma_min_pos;
  c.hoelder = {c.sharp_mod, 2.0};
  c.radius_r = 2.0 * y_radius;
  c.c_f = inv_n * (a_fro * x_region + y_radius + b_lbl->norm()) * (1.0 + a_fro);
  c.c_g = (lam + 1.0) * sigma_max * c.c_f;
  c.big_m = c.c_f;
  p.constants = c;

  GroundTruth t;
  const double w_gap = lam / (1.0 + lam);
  t.y_star = [a, b_lbl, m_diag, lam](const DenseVector& x) {
    DenseVector ax = matvec(*a, x);
    DenseVector y(ax.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = (*m_diag)[i] > 0.0 ? (ax[i] + lam * (*b_lbl)[i]) / (1.0 + lam) : ax[i];
    return y;
  };
  t.phi = [a, b_lbl, m_diag, inv_n, w_gap](const DenseVector& x) {
    DenseVector ax = matvec(*a, x);
    double v = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i)
      if ((*m_diag)[i] > 0.0) {
        const double d = w_gap * (ax[i] - (*b_lbl)[i]);
        v += d * d;
      }
    return 0.5 * inv_n * v;
  };
  t.grad_phi = [a, b_lbl, m_diag, inv_n, w_gap](const DenseVector& x) {
    DenseVector ax = matvec(*a, x);
    DenseVector r(ax.size(), 0.0);
    for (std::size_t i = 0; i < ax.size(); ++i)
      if ((*m_diag)[i] > 0.0) r[i] = w_gap * w_gap * (ax[i] - (*b_lbl)[i]);
    return inv_n * matvec_t(*a, r);
  };
  t.g_star = [a, b_lbl, m_diag, inv_n, lam](const DenseVector& x) {
    DenseVector ax = matvec(*a, x);
    double v = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i)
      if ((*m_diag)[i] > 0.0) {
        const double d = ax[i] - (*b_lbl)[i];
        v += (*m_diag)[i] * lam / (1.0 + lam) * d * d;
      }
    return 0.5 * inv_n * v;
  };
  p.truth = std::move(t);
  return p;
}

// ---------------------------------------------------------------------------
// Regularization failure demo
// ---------------------------------------------------------------------------

RegularizationDemo regularization_failure_demo(double lambda_reg, double pivot_y1) {
  if (lambda_reg <= 0.0)
    throw ContractViolation("regularization_failure_demo: lambda_reg must be positive");
  RegularizationDemo d;
  d.lambda_reg = lambda_reg;
  d.pivot_y1 = pivot_y1;
  const bool nonzero = pivot_y1 != 0.0;
  d.case_name = nonzero ? "pivot_nonzero" : "pivot_zero";
  d.phi_reg_formula = nonzero ? "y1^2 - 2*x*y1 with y1 = pivot" : "1 - 2*x";
  for (int i = -10; i <= 10; ++i) {
    const double x = 0.2 * static_cast<double>(i);
    d.grid.push_back(x);
    d.phi.push_back(-x * x);
    d.phi_reg.push_back(nonzero ? pivot_y1 * pivot_y1 - 2.0 * x * pivot_y1
                                : 1.0 - 2.0 * x);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

const std::vector<ProblemInfo>& problem_registry() {
  static const std::vector<ProblemInfo> reg = {
      {"quadratic", "quadratic bilevel family with closed-form hypergradient (dx, dy, cond)"},
      {"wshape", "W-shaped minimax instance with a strict saddle at the origin"},
      {"zerochain-smooth", "smooth worst-case chain lower bound instance (k)"},
      {"zerochain-lip", "nonsmooth worst-case chain lower bound instance (k)"},
      {"pl-remark2", "gradient-dominated lower level on a box; phi(x) = (x-1)^2"},
      {"advls", "adversarial least-squares generator with a flat LL block (n, dx, lam)"},
      {"ex41", "discontinuous hyper-objective x^2 + sign(x); diagnostics only"},
      {"ex51", "nonsmooth hyper-objective -|x|"},
      {"prop41", "regularized-lower-level failure demo (lam); report only"},
  };
  return reg;
}

bool is_known_problem(const std::string& id) {
  for (const auto& e : problem_registry())
    if (e.id == id) return true;
  return false;
}

namespace {
double param_or(const ProblemParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}
}  // namespace

BuiltProblem build_problem(const std::string& id, const ProblemParams& params,
                           std::uint64_t seed) {
  BuiltProblem out;
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);  // instance stream, decoupled from the run stream
  if (id == "quadratic") {
    const int dx = static_cast<int>(param_or(params, "dx", 5));
    const int dy = static_cast<int>(param_or(params, "dy", 5));
    const double cond = param_or(params, "cond", 0.0);
    out.blo = cond >= 1.0 ? make_quadratic(dx, dy, rng, cond).as_problem()
                          : make_quadratic_unit(dx).as_problem();
  } else if (id == "wshape") {
    out.minimax = make_wshape();
  } else if (id == "zerochain-smooth") {
    out.blo = make_zero_chain(ZeroChainVariant::smooth,
                              static_cast<int>(param_or(params, "k", 20)));
  } else if (id == "zerochain-lip") {
    out.blo = make_zero_chain(ZeroChainVariant::lipschitz,
                              static_cast<int>(param_or(params, "k", 20)));
  } else if (id == "pl-remark2") {
    out.blo = make_pl_remark2();
  } else if (id == "advls") {
    out.blo = make_adv_least_squares(static_cast<int>(param_or(params, "n", 40)),
                                     static_cast<int>(param_or(params, "dx", 8)),
                                     param_or(params, "lam", 1.0), rng);
  } else if (id == "ex41") {
    out.blo = make_ex41();
  } else if (id == "ex51") {
    out.blo = make_ex51();
  } else if (id == "prop41") {
    out.demo_only = true;
  } else {
    throw ContractViolation("unknown problem id: " + id);
  }
  return out;
}

}  // namespace bilevel
