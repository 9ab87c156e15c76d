#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bilevel/core.hpp"
#include "bilevel/linalg.hpp"
#include "bilevel/pragda.hpp"

namespace bilevel {

// Stationarity / optimality measurements against an instance's ground truth
// (or finite differences of it when only values are available).
struct StationarityReport {
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> hess_min_eig;
  std::optional<double> goldstein_gap;
  std::optional<double> ll_value_gap;
  std::optional<double> ll_feas_gap;
  bool pass = false;
  std::string to_json() const;  // stable field names, null when absent
};

// Central finite differences with h = cbrt(machine eps) * (1 + |coordinate|).
DenseVector fd_gradient(const std::function<double(const DenseVector&)>& phi,
                        const DenseVector& x);
// Symmetrized central-difference Hessian (row-major d*d).
Mat fd_hessian(const std::function<double(const DenseVector&)>& phi, const DenseVector& x);

// ||grad phi(x)|| <= eps, from ground-truth gradient or FD of the value.
std::pair<bool, StationarityReport> fosp_check(const GroundTruth& truth,
                                               const DenseVector& x, double eps);

// Adds the minimum Hessian eigenvalue test (analytic Hessian when the truth
// carries one, FD Hessian otherwise; FD is refused above 20 dims).
std::pair<bool, StationarityReport> sosp_check(const GroundTruth& truth,
                                               const DenseVector& x, double eps, double tau);

// Norm of the minimum-norm point of the convex hull of the given vectors,
// computed by a pairwise conditional-gradient iteration to 1e-8 duality gap.
DenseVector min_norm_point(const std::vector<DenseVector>& points);

// Samples m gradients of phi at points of the delta-ball around x (ground
// truth gradient when available, else FD of the value; kinks are a null set
// for the samplers used here) and returns the min-norm-point estimate. An
// upper estimate of the true gap: sampling sees a subset of the hull.
double goldstein_gap(const GroundTruth& truth, const DenseVector& x, double delta,
                     int m_samples, Rng& rng);

// |f(x,y) - phi(x)| <= zeta_f and g(x,y) - g*(x) <= zeta_g.
std::pair<bool, StationarityReport> ll_optimality_check(const BilevelProblem& p,
                                                        const DenseVector& x,
                                                        const DenseVector& y_hat,
                                                        double zeta_f, double zeta_g);

// Consistency of a declared analytic gradient against central differences of
// the declared value at random probes; returns the worst relative error.
double ground_truth_fd_error(const GroundTruth& truth, int d_x, Rng& rng, int probes);

// Hausdorff distance between finite point sets (test utility).
double hausdorff_distance(const std::vector<DenseVector>& s1,
                          const std::vector<DenseVector>& s2);

// Plain simultaneous gradient descent-ascent reference loop. Test scaffolding
// for the stuck-at-saddle comparison, not a supported solver.
struct GdaResult {
  DenseVector x;
  DenseVector y;
  std::uint64_t grad_queries = 0;
};
GdaResult gda_reference_loop(const MinimaxProblem& p, DenseVector x0, DenseVector y0,
                             double eta_x, double eta_y, std::uint64_t max_grad_queries);

}  // namespace bilevel
