#pragma once

#include <vector>

#include "bilevel/rng.hpp"
#include "bilevel/vector.hpp"

namespace bilevel {

// Small dense row-major matrix, sized for problem construction and
// diagnostics (d <= a few hundred). Hot solver loops never touch it.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  const double* row(std::size_t i) const { return a_.data() + i * cols_; }
  bool empty() const { return a_.empty(); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

DenseVector matvec(const Mat& a, const DenseVector& x);
DenseVector matvec_t(const Mat& a, const DenseVector& x);  // a^T x
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
Mat cholesky(const Mat& spd);

// Solves (L L^T) x = b given the Cholesky factor.
DenseVector cholesky_solve(const Mat& chol_l, const DenseVector& b);

// All eigenvalues of a symmetric matrix by the cyclic Jacobi iteration,
// unsorted.
std::vector<double> symmetric_eigenvalues(Mat sym);

double min_eigenvalue(const Mat& sym);

// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the sign
// convention fixed so the result is deterministic in the stream.
Mat random_orthogonal(Rng& rng, std::size_t n);

}  // namespace bilevel
