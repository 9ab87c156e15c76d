#include "bilevel/kernels.hpp"

#if defined(BILEVEL_HAVE_AVX2)

#include <immintrin.h>

// AVX2 kernels. Multiplies and adds are kept separate (no FMA) so every lane
// performs the same IEEE operations as the scalar reference; the horizontal
// reduction (a0+a2)+(a1+a3) matches the scalar 4-accumulator tree exactly.
namespace bilevel::kernels::avx2 {

bool cpu_supported() { return __builtin_cpu_supports("avx2"); }

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);        // [a0, a1]
  __m128d hi = _mm256_extractf128_pd(v, 1);      // [a2, a3]
  __m128d s2 = _mm_add_pd(lo, hi);               // [a0+a2, a1+a3]
  __m128d shuf = _mm_unpackhi_pd(s2, s2);
  return _mm_cvtsd_f64(_mm_add_sd(s2, shuf));    // (a0+a2)+(a1+a3)
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n4 = n - (n % 4);
  for (; i < n4; i += 4) {
    __m256d xv = _mm256_loadu_pd(x + i);
    __m256d yv = _mm256_loadu_pd(y + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(xv, yv));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  const std::size_t n4 = n - (n % 4);
  for (; i < n4; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    __m256d xv = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(av, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, const double* x, double* out, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  const std::size_t n4 = n - (n % 4);
  for (; i < n4; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = a * x[i];
}

void add(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  const std::size_t n4 = n - (n % 4);
  for (; i < n4; i += 4)
    _mm256_storeu_pd(out + i,
                     _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] + y[i];
}

void sub(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  const std::size_t n4 = n - (n % 4);
  for (; i < n4; i += 4)
    _mm256_storeu_pd(out + i,
                     _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] - y[i];
}

void sub_scaled(const double* x, double a, const double* g, double* out, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  const std::size_t n4 = n - (n % 4);
  for (; i < n4; i += 4) {
    __m256d xv = _mm256_loadu_pd(x + i);
    __m256d gv = _mm256_loadu_pd(g + i);
    _mm256_storeu_pd(out + i, _mm256_sub_pd(xv, _mm256_mul_pd(av, gv)));
  }
  for (; i < n; ++i) out[i] = x[i] - a * g[i];
}

void extrapolate(const double* cur, const double* prev, double beta, double* out,
                 std::size_t n) {
  const __m256d bv = _mm256_set1_pd(beta);
  std::size_t i = 0;
  const std::size_t n4 = n - (n % 4);
  for (; i < n4; i += 4) {
    __m256d cv = _mm256_loadu_pd(cur + i);
    __m256d pv = _mm256_loadu_pd(prev + i);
    _mm256_storeu_pd(out + i,
                     _mm256_add_pd(cv, _mm256_mul_pd(bv, _mm256_sub_pd(cv, pv))));
  }
  for (; i < n; ++i) out[i] = cur[i] + beta * (cur[i] - prev[i]);
}

void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) {
  std::size_t i = 0;
  const std::size_t n4 = n - (n % 4);
  for (; i < n4; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    v = _mm256_max_pd(v, _mm256_loadu_pd(lo + i));
    v = _mm256_min_pd(v, _mm256_loadu_pd(hi + i));
    _mm256_storeu_pd(out + i, v);
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

}  // namespace bilevel::kernels::avx2

#endif  // BILEVEL_HAVE_AVX2
