#pragma once

#include <cstddef>
#include <string>

// Dense double-precision kernels behind all vector arithmetic. A scalar
// reference implementation always exists; an AVX2 (x86-64) or NEON (aarch64)
// variant is selected at runtime when the CPU supports it. All variants
// produce bit-identical results: element-wise kernels perform the same IEEE
// operations per element, and reductions use a fixed stride-4 accumulation
// tree that matches the SIMD lane layout.
namespace bilevel::kernels {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);

// Active instruction set. Resolved on first use: BILEVEL_KIT_KERNELS
// (scalar|avx2|neon) if set and available, otherwise the best available.
Isa active();

// Test hook; throws if the requested variant is unavailable on this CPU.
void force(Isa isa);

// sum_i x[i]*y[i]
double dot(const double* x, const double* y, std::size_t n);

// y += a*x
void axpy(double a, const double* x, double* y, std::size_t n);

// out = a*x
void scale(double a, const double* x, double* out, std::size_t n);

// out = x + y
void add(const double* x, const double* y, double* out, std::size_t n);

// out = x - y
void sub(const double* x, const double* y, double* out, std::size_t n);

// out = x - a*g  (gradient step)
void sub_scaled(const double* x, double a, const double* g, double* out, std::size_t n);

// out = cur + beta*(cur - prev)  (momentum extrapolation)
void extrapolate(const double* cur, const double* prev, double beta, double* out,
                 std::size_t n);

// out = min(max(x, lo), hi) coordinate-wise
void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n);

// Kernel table for one ISA; used by the dispatcher and the equivalence tests.
struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, const double*, double*, std::size_t);
  void (*add)(const double*, const double*, double*, std::size_t);
  void (*sub)(const double*, const double*, double*, std::size_t);
  void (*sub_scaled)(const double*, double, const double*, double*, std::size_t);
  void (*extrapolate)(const double*, const double*, double, double*, std::size_t);
  void (*clamp)(const double*, const double*, const double*, double*, std::size_t);
};

// Table for a specific ISA (throws if unavailable). Lets tests run two
// variants side by side regardless of the active dispatch.
const Table& table_for(Isa isa);

}  // namespace bilevel::kernels
