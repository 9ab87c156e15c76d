#include "bilevel/kernels.hpp"

#if defined(BILEVEL_HAVE_NEON)

#include <arm_neon.h>

// NEON kernels (two float64x2_t registers per stride-4 block). The reduction
// combines accumulators as (a0+a2)+(a1+a3), the same tree as the scalar
// reference and the AVX2 variant.
namespace bilevel::kernels::neon {

namespace {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t accA = vdupq_n_f64(0.0);  // lanes 0,1 of each block
  float64x2_t accB = vdupq_n_f64(0.0);  // lanes 2,3
  std::size_t i = 0;
  const std::size_t n4 = n - (n % 4);
  for (; i < n4; i += 4) {
    accA = vaddq_f64(accA, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    accB = vaddq_f64(accB, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  float64x2_t s2 = vaddq_f64(accA, accB);  // [a0+a2, a1+a3]
  double s = vgetq_lane_f64(s2, 0) + vgetq_lane_f64(s2, 1);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  const std::size_t n2 = n - (n % 2);
  for (; i < n2; i += 2) {
    float64x2_t yv = vld1q_f64(y + i);
    vst1q_f64(y + i, vaddq_f64(yv, vmulq_f64(av, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, const double* x, double* out, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  const std::size_t n2 = n - (n % 2);
  for (; i < n2; i += 2) vst1q_f64(out + i, vmulq_f64(av, vld1q_f64(x + i)));
  for (; i < n; ++i) out[i] = a * x[i];
}

void add(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  const std::size_t n2 = n - (n % 2);
  for (; i < n2; i += 2)
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] + y[i];
}

void sub(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  const std::size_t n2 = n - (n % 2);
  for (; i < n2; i += 2)
    vst1q_f64(out + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] - y[i];
}

void sub_scaled(const double* x, double a, const double* g, double* out, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  const std::size_t n2 = n - (n % 2);
  for (; i < n2; i += 2)
    vst1q_f64(out + i,
              vsubq_f64(vld1q_f64(x + i), vmulq_f64(av, vld1q_f64(g + i))));
  for (; i < n; ++i) out[i] = x[i] - a * g[i];
}

void extrapolate(const double* cur, const double* prev, double beta, double* out,
                 std::size_t n) {
  const float64x2_t bv = vdupq_n_f64(beta);
  std::size_t i = 0;
  const std::size_t n2 = n - (n % 2);
  for (; i < n2; i += 2) {
    float64x2_t cv = vld1q_f64(cur + i);
    float64x2_t pv = vld1q_f64(prev + i);
    vst1q_f64(out + i, vaddq_f64(cv, vmulq_f64(bv, vsubq_f64(cv, pv))));
  }
  for (; i < n; ++i) out[i] = cur[i] + beta * (cur[i] - prev[i]);
}

void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) {
  std::size_t i = 0;
  const std::size_t n2 = n - (n % 2);
  for (; i < n2; i += 2) {
    float64x2_t v = vld1q_f64(x + i);
    v = vmaxq_f64(v, vld1q_f64(lo + i));
    v = vminq_f64(v, vld1q_f64(hi + i));
    vst1q_f64(out + i, v);
  }
  for (; i < n; ++i) {
    double v = x[i];
    if (v < lo[i]) v = lo[i];
    if (v > hi[i]) v = hi[i];
    out[i] = v;
  }
}

}  // namespace

extern const Table kTable;
const Table kTable = {dot, axpy, scale, add, sub, sub_scaled, extrapolate, clamp};

}  // namespace bilevel::kernels::neon

#endif  // BILEVEL_HAVE_NEON
