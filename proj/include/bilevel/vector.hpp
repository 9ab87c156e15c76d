#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "bilevel/kernels.hpp"

namespace bilevel {

// Thrown when a caller breaks a documented precondition (dimension mismatch,
// invalid radius, missing constants, ...).
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when a run must abort: a NaN/Inf escaped an oracle or an iterate
// became non-finite. The message carries the offending iterate.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixed-dimension dense vector over doubles; the iterate type of every solver.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t d, double fill = 0.0) : v_(d, fill) {}
  DenseVector(std::initializer_list<double> init) : v_(init) {}

  static DenseVector zeros(std::size_t d) { return DenseVector(d, 0.0); }

  std::size_t size() const { return v_.size(); }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  double dot(const DenseVector& o) const {
    check_same_dim(o, "dot");
    return kernels::dot(data(), o.data(), size());
  }
  double squared_norm() const { return kernels::dot(data(), data(), size()); }
  double norm() const { return std::sqrt(squared_norm()); }

  // this += a*x
  void axpy_in(double a, const DenseVector& x) {
    check_same_dim(x, "axpy");
    kernels::axpy(a, x.data(), data(), size());
  }

  void fill(double v) { v_.assign(v_.size(), v); }

  friend DenseVector operator+(const DenseVector& a, const DenseVector& b) {
    a.check_same_dim(b, "operator+");
    DenseVector out(a.size());
    kernels::add(a.data(), b.data(), out.data(), a.size());
    return out;
  }
  friend DenseVector operator-(const DenseVector& a, const DenseVector& b) {
    a.check_same_dim(b, "operator-");
    DenseVector out(a.size());
    kernels::sub(a.data(), b.data(), out.data(), a.size());
    return out;
  }
  friend DenseVector operator*(double a, const DenseVector& x) {
    DenseVector out(x.size());
    kernels::scale(a, x.data(), out.data(), x.size());
    return out;
  }
  friend DenseVector operator-(const DenseVector& x) { return -1.0 * x; }
  friend bool operator==(const DenseVector& a, const DenseVector& b) {
    return a.v_ == b.v_;
  }

  std::string str() const;

  void check_same_dim(const DenseVector& o, const char* op) const {
    if (size() != o.size())
      throw ContractViolation(std::string(op) + ": dimension mismatch (" +
                              std::to_string(size()) + " vs " +
                              std::to_string(o.size()) + ")");
  }

 private:
  std::vector<double> v_;
};

// out = x - a*g
inline DenseVector sub_scaled(const DenseVector& x, double a, const DenseVector& g) {
  x.check_same_dim(g, "sub_scaled");
  DenseVector out(x.size());
  kernels::sub_scaled(x.data(), a, g.data(), out.data(), x.size());
  return out;
}

// out = cur + beta*(cur - prev)
inline DenseVector extrapolate(const DenseVector& cur, const DenseVector& prev,
                               double beta) {
  cur.check_same_dim(prev, "extrapolate");
  DenseVector out(cur.size());
  kernels::extrapolate(cur.data(), prev.data(), beta, out.data(), cur.size());
  return out;
}

inline DenseVector clamp(const DenseVector& x, const DenseVector& lo,
                         const DenseVector& hi) {
  x.check_same_dim(lo, "clamp");
  x.check_same_dim(hi, "clamp");
  DenseVector out(x.size());
  kernels::clamp(x.data(), lo.data(), hi.data(), out.data(), x.size());
  return out;
}

}  // namespace bilevel
