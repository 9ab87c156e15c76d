#include "bilevel/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace bilevel::kernels {

// ---------------------------------------------------------------------------
// Scalar reference kernels.
//
// dot uses four independent accumulators striding the input by 4 and reduces
// them as (a0+a2)+(a1+a3), which is exactly the horizontal-sum order of one
// 4-lane vector register; the SIMD variants therefore match it bit-for-bit.
// ---------------------------------------------------------------------------
namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  const std::size_t n4 = n - (n % 4);
  for (; i < n4; i += 4) {
    a0 += x[i] * y[i];
    a1 += x[i + 1] * y[i + 1];
    a2 += x[i + 2] * y[i + 2];
    a3 += x[i + 3] * y[i + 3];
  }
  double s = (a0 + a2) + (a1 + a3);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void add(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + y[i];
}

void sub(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

void sub_scaled(const double* x, double a, const double* g, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - a * g[i];
}

void extrapolate(const double* cur, const double* prev, double beta, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = cur[i] + beta * (cur[i] - prev[i]);
}

void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = x[i];
    if (v < lo[i]) v = lo[i];
    if (v > hi[i]) v = hi[i];
    out[i] = v;
  }
}

}  // namespace scalar

namespace {

const Table kScalarTable = {
    scalar::dot, scalar::axpy,       scalar::scale,       scalar::add,
    scalar::sub, scalar::sub_scaled, scalar::extrapolate, scalar::clamp,
};

}  // namespace

#if defined(BILEVEL_HAVE_AVX2)
namespace avx2 {
extern const Table kTable;
bool cpu_supported();
}  // namespace avx2
#endif
#if defined(BILEVEL_HAVE_NEON)
namespace neon {
extern const Table kTable;
}
#endif

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(BILEVEL_HAVE_AVX2)
      return avx2::cpu_supported();
#else
      return false;
#endif
    case Isa::neon:
#if defined(BILEVEL_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Table& table_for(Isa isa) {
  if (!isa_available(isa))
    throw std::runtime_error(std::string("kernel variant unavailable on this cpu: ") +
                             isa_name(isa));
  switch (isa) {
    case Isa::scalar: return kScalarTable;
#if defined(BILEVEL_HAVE_AVX2)
    case Isa::avx2: return avx2::kTable;
#endif
#if defined(BILEVEL_HAVE_NEON)
    case Isa::neon: return neon::kTable;
#endif
    default: return kScalarTable;
  }
}

namespace {

Isa resolve_initial() {
  if (const char* env = std::getenv("BILEVEL_KIT_KERNELS")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa)) {
        if (!isa_available(isa))
          throw std::runtime_error("BILEVEL_KIT_KERNELS requests unavailable variant: " +
                                   want);
        return isa;
      }
    }
    throw std::runtime_error("BILEVEL_KIT_KERNELS: unknown variant: " + want);
  }
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

struct Dispatch {
  Isa isa;
  const Table* table;
  Dispatch() : isa(resolve_initial()), table(&table_for(isa)) {}
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Isa active() { return dispatch().isa; }

void force(Isa isa) {
  Dispatch& d = dispatch();
  d.table = &table_for(isa);
  d.isa = isa;
}

double dot(const double* x, const double* y, std::size_t n) {
  return dispatch().table->dot(x, y, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  dispatch().table->axpy(a, x, y, n);
}
void scale(double a, const double* x, double* out, std::size_t n) {
  dispatch().table->scale(a, x, out, n);
}
void add(const double* x, const double* y, double* out, std::size_t n) {
  dispatch().table->add(x, y, out, n);
}
void sub(const double* x, const double* y, double* out, std::size_t n) {
  dispatch().table->sub(x, y, out, n);
}
void sub_scaled(const double* x, double a, const double* g, double* out, std::size_t n) {
  dispatch().table->sub_scaled(x, a, g, out, n);
}
void extrapolate(const double* cur, const double* prev, double beta, double* out,
                 std::size_t n) {
  dispatch().table->extrapolate(cur, prev, beta, out, n);
}
void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) {
  dispatch().table->clamp(x, lo, hi, out, n);
}

}  // namespace bilevel::kernels
