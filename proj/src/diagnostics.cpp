#include "bilevel/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bilevel/trace.hpp"

namespace bilevel {

namespace {
const double kFdStep = std::cbrt(std::numeric_limits<double>::epsilon());

void append_json_field(std::ostringstream& os, const char* name,
                       const std::optional<double>& v, bool& first) {
  if (!first) os << ",";
  first = false;
  os << "\"" << name << "\":";
  if (v.has_value())
    os << format_double(*v);
  else
    os << "null";
}
}  // namespace

std::string StationarityReport::to_json() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  append_json_field(os, "grad_norm", grad_norm, first);
  append_json_field(os, "hess_min_eig", hess_min_eig, first);
  append_json_field(os, "goldstein_gap", goldstein_gap, first);
  append_json_field(os, "ll_value_gap", ll_value_gap, first);
  append_json_field(os, "ll_feas_gap", ll_feas_gap, first);
  os << ",\"pass\":" << (pass ? "true" : "false") << "}";
  return os.str();
}

DenseVector fd_gradient(const std::function<double(const DenseVector&)>& phi,
                        const DenseVector& x) {
  DenseVector g(x.size());
  DenseVector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = kFdStep * (1.0 + std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fp = phi(probe);
    probe[i] = x[i] - h;
    const double fm = phi(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian(const std::function<double(const DenseVector&)>& phi, const DenseVector& x) {
  const std::size_t d = x.size();
  Mat h(d, d);
  DenseVector p = x;
  const double step = std::sqrt(kFdStep);  // eps^(1/6); balances the second difference
  for (std::size_t i = 0; i < d; ++i) {
    const double hi = step * (1.0 + std::abs(x[i]));
    for (std::size_t j = i; j < d; ++j) {
      const double hj = step * (1.0 + std::abs(x[j]));
      if (i == j) {
        p[i] = x[i] + hi;
        const double fp = phi(p);
        p[i] = x[i] - hi;
        const double fm = phi(p);
        p[i] = x[i];
        h(i, i) = (fp - 2.0 * phi(x) + fm) / (hi * hi);
      } else {
        p[i] = x[i] + hi;
        p[j] = x[j] + hj;
        const double fpp = phi(p);
        p[j] = x[j] - hj;
        const double fpm = phi(p);
        p[i] = x[i] - hi;
        p[j] = x[j] + hj;
        const double fmp = phi(p);
        p[j] = x[j] - hj;
        const double fmm = phi(p);
        p[i] = x[i];
        p[j] = x[j];
        const double v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
        h(i, j) = v;
        h(j, i) = v;
      }
    }
  }
  return h;
}

std::pair<bool, StationarityReport> fosp_check(const GroundTruth& truth,
                                               const DenseVector& x, double eps) {
  StationarityReport r;
  if (truth.grad_phi)
    r.grad_norm = truth.grad_phi(x).norm();
  else if (truth.phi)
    r.grad_norm = fd_gradient(truth.phi, x).norm();
  else
    throw ContractViolation("fosp_check: instance exposes neither grad phi nor phi");
  r.pass = r.grad_norm <= eps;
  return {r.pass, r};
}

std::pair<bool, StationarityReport> sosp_check(const GroundTruth& truth,
                                               const DenseVector& x, double eps,
                                               double tau) {
  auto [ok1, r] = fosp_check(truth, x, eps);
  Mat h;
  if (truth.hess_phi) {
    const std::vector<double> raw = truth.hess_phi(x);
    const std::size_t d = x.size();
    h = Mat(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) h(i, j) = raw[i * d + j];
  } else if (truth.phi) {
    if (x.size() > 20)
      throw ContractViolation("sosp_check: FD Hessian limited to 20 dims");
    h = fd_hessian(truth.phi, x);
    for (std::size_t i = 0; i < h.rows(); ++i)
      for (std::size_t j = i + 1; j < h.cols(); ++j) {
        const double s = 0.5 * (h(i, j) + h(j, i));
        h(i, j) = s;
        h(j, i) = s;
      }
  } else {
    throw ContractViolation("sosp_check: no Hessian route available");
  }
  r.hess_min_eig = min_eigenvalue(h);
  r.pass = ok1 && *r.hess_min_eig >= -tau;
  return {r.pass, r};
}

DenseVector min_norm_point(const std::vector<DenseVector>& points) {
  if (points.empty()) throw ContractViolation("min_norm_point: empty set");
  const std::size_t m = points.size();
  // Start from the shortest vertex.
  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (points[i].squared_norm() < points[best].squared_norm()) best = i;
  std::vector<double> wgt(m, 0.0);
  wgt[best] = 1.0;
  DenseVector q = points[best];

  // Pairwise conditional gradient on the simplex for min ||sum w_i p_i||^2.
  for (int it = 0; it < 200000; ++it) {
    double min_dot = std::numeric_limits<double>::infinity();
    std::size_t s = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = points[i].dot(q);
      if (d < min_dot) {
        min_dot = d;
        s = i;
      }
    }
    const double gap = q.squared_norm() - min_dot;
    if (gap <= 1e-8) break;
    // Away vertex among the support.
    double max_dot = -std::numeric_limits<double>::infinity();
    std::size_t a = s;
    for (std::size_t i = 0; i < m; ++i)
      if (wgt[i] > 0.0) {
        const double d = points[i].dot(q);
        if (d > max_dot) {
          max_dot = d;
          a = i;
        }
      }
    DenseVector dir = points[s] - points[a];
    const double denom = dir.squared_norm();
    if (denom <= 0.0) break;
    double gamma = -q.dot(dir) / denom;
    gamma = std::min(gamma, wgt[a]);
    if (gamma <= 0.0) break;
    wgt[s] += gamma;
    wgt[a] -= gamma;
    q.axpy_in(gamma, dir);
  }
  return q;
}

double goldstein_gap(const GroundTruth& truth, const DenseVector& x, double delta,
                     int m_samples, Rng& rng) {
  if (m_samples < 2) throw ContractViolation("goldstein_gap: need at least 2 samples");
  if (delta < 0.0) throw ContractViolation("goldstein_gap: delta must be >= 0");
  if (!truth.grad_phi && !truth.phi)
    throw ContractViolation("goldstein_gap: instance exposes neither grad phi nor phi");
  std::vector<DenseVector> grads;
  grads.reserve(static_cast<std::size_t>(m_samples));
  for (int i = 0; i < m_samples; ++i) {
    DenseVector probe = x;
    if (delta > 0.0) probe.axpy_in(1.0, sample_ball(rng, static_cast<int>(x.size()), delta));
    grads.push_back(truth.grad_phi ? truth.grad_phi(probe) : fd_gradient(truth.phi, probe));
  }
  return min_norm_point(grads).norm();
}

std::pair<bool, StationarityReport> ll_optimality_check(const BilevelProblem& p,
                                                        const DenseVector& x,
                                                        const DenseVector& y_hat,
                                                        double zeta_f, double zeta_g) {
  if (!p.truth.phi || !p.truth.g_star)
    throw ContractViolation("ll_optimality_check: requires phi and g* ground truth");
  StationarityReport r;
  const double f_val = p.f_val(x, y_hat);
  const double g_val = p.g_val(x, y_hat);
  r.ll_value_gap = std::abs(f_val - p.truth.phi(x));
  r.ll_feas_gap = g_val - p.truth.g_star(x);
  r.grad_norm = 0.0;
  r.pass = *r.ll_value_gap <= zeta_f && *r.ll_feas_gap <= zeta_g;
  return {r.pass, r};
}

double ground_truth_fd_error(const GroundTruth& truth, int d_x, Rng& rng, int probes) {
  if (!truth.phi || !truth.grad_phi)
    throw ContractViolation("ground_truth_fd_error: needs both phi and grad phi");
  DenseVector center = DenseVector::zeros(static_cast<std::size_t>(d_x));
  double radius = 1.0;
  if (truth.fd_region) {
    center = truth.fd_region->first;
    radius = truth.fd_region->second;
  }
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    DenseVector x = center;
    x.axpy_in(1.0, sample_ball(rng, d_x, radius));
    const DenseVector ga = truth.grad_phi(x);
    const DenseVector gf = fd_gradient(truth.phi, x);
    worst = std::max(worst, (ga - gf).norm() / (1.0 + ga.norm()));
  }
  return worst;
}

double hausdorff_distance(const std::vector<DenseVector>& s1,
                          const std::vector<DenseVector>& s2) {
  if (s1.empty() || s2.empty())
    throw ContractViolation("hausdorff_distance: sets must be nonempty");
  const auto one_sided = [](const std::vector<DenseVector>& a,
                            const std::vector<DenseVector>& b) {
    double worst = 0.0;
    for (const DenseVector& p : a) {
      double best = std::numeric_limits<double>::infinity();
      for (const DenseVector& q : b) best = std::min(best, (p - q).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(s1, s2), one_sided(s2, s1));
}

GdaResult gda_reference_loop(const MinimaxProblem& p, DenseVector x0, DenseVector y0,
                             double eta_x, double eta_y, std::uint64_t max_grad_queries) {
  GdaResult res;
  res.x = std::move(x0);
  res.y = std::move(y0);
  while (res.grad_queries + 2 <= max_grad_queries) {
    DenseVector gy = p.grad_fbar_y(res.x, res.y);
    DenseVector gx = p.grad_fbar_x(res.x, res.y);
    res.grad_queries += 2;
    res.y.axpy_in(eta_y, gy);   // ascent
    res.x.axpy_in(-eta_x, gx);  // descent
  }
  return res;
}

}  // namespace bilevel
