#include "bilevel/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "bilevel/kernels.hpp"

namespace bilevel {

DenseVector matvec(const Mat& a, const DenseVector& x) {
  if (a.cols() != x.size()) throw ContractViolation("matvec: dimension mismatch");
  DenseVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    out[i] = kernels::dot(a.row(i), x.data(), a.cols());
  return out;
}

DenseVector matvec_t(const Mat& a, const DenseVector& x) {
  if (a.rows() != x.size()) throw ContractViolation("matvec_t: dimension mismatch");
  DenseVector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) kernels::axpy(x[i], a.row(i), out.data(), a.cols());
  return out;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw ContractViolation("matmul: dimension mismatch");
  Mat out(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Mat transpose(const Mat& a) {
  Mat out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Mat cholesky(const Mat& spd) {
  if (spd.rows() != spd.cols()) throw ContractViolation("cholesky: matrix must be square");
  const std::size_t n = spd.rows();
  Mat l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = spd(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0) throw NumericError("cholesky: matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = spd(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

DenseVector cholesky_solve(const Mat& chol_l, const DenseVector& b) {
  const std::size_t n = chol_l.rows();
  if (b.size() != n) throw ContractViolation("cholesky_solve: dimension mismatch");
  DenseVector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol_l(i, k) * y[k];
    y[i] = s / chol_l(i, i);
  }
  DenseVector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= chol_l(k, ii) * x[k];
    x[ii] = s / chol_l(ii, ii);
  }
  return x;
}

std::vector<double> symmetric_eigenvalues(Mat sym) {
  if (sym.rows() != sym.cols())
    throw ContractViolation("symmetric_eigenvalues: matrix must be square");
  const std::size_t n = sym.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += sym(i, j) * sym(i, j);
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = sym(p, q);
        if (std::abs(apq) < 1e-30) continue;
        const double app = sym(p, p), aqq = sym(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = sym(k, p), akq = sym(k, q);
          sym(k, p) = c * akp - s * akq;
          sym(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = sym(p, k), aqk = sym(q, k);
          sym(p, k) = c * apk - s * aqk;
          sym(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> eigs(n);
  for (std::size_t i = 0; i < n; ++i) eigs[i] = sym(i, i);
  return eigs;
}

double min_eigenvalue(const Mat& sym) {
  const std::vector<double> eigs = symmetric_eigenvalues(sym);
  return *std::min_element(eigs.begin(), eigs.end());
}

Mat random_orthogonal(Rng& rng, std::size_t n) {
  // Householder QR of a Gaussian matrix, accumulating Q explicitly.
  Mat a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.normal();
  Mat q = Mat::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    double nrm = 0.0;
    for (std::size_t i = k; i < n; ++i) nrm += a(i, k) * a(i, k);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-14) continue;
    std::vector<double> v(n, 0.0);
    const double alpha = a(k, k) >= 0.0 ? -nrm : nrm;
    v[k] = a(k, k) - alpha;
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    double vtv = 0.0;
    for (std::size_t i = k; i < n; ++i) vtv += v[i] * v[i];
    if (vtv < 1e-28) continue;
    const double beta = 2.0 / vtv;
    // a <- (I - beta v v^T) a ; q <- q (I - beta v v^T)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += v[i] * a(i, j);
      s *= beta;
      for (std::size_t i = k; i < n; ++i) a(i, j) -= s * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k; j < n; ++j) s += q(i, j) * v[j];
      s *= beta;
      for (std::size_t j = k; j < n; ++j) q(i, j) -= s * v[j];
    }
  }
  // Fix signs so diag(R) > 0; makes the draw unambiguous.
  for (std::size_t k = 0; k < n; ++k)
    if (a(k, k) < 0.0)
      for (std::size_t i = 0; i < n; ++i) q(i, k) = -q(i, k);
  return q;
}

}  // namespace bilevel
