#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <vector>

#include "bilevel/kernels.hpp"
#include "bilevel/rng.hpp"

using namespace bilevel;
namespace kn = bilevel::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 3.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels compute what they claim") {
  const kn::Table& t = kn::table_for(kn::Isa::scalar);
  std::vector<double> x = {1.0, 2.0, 3.0};
  std::vector<double> y = {4.0, -5.0, 6.0};
  CHECK(t.dot(x.data(), y.data(), 3) == doctest::Approx(1.0 * 4 - 10 + 18));
  std::vector<double> out(3);
  t.sub_scaled(x.data(), 2.0, y.data(), out.data(), 3);
  CHECK(out[0] == -7.0);
  CHECK(out[1] == 12.0);
  CHECK(out[2] == -9.0);
  t.extrapolate(x.data(), y.data(), 0.5, out.data(), 3);
  CHECK(out[0] == 1.0 + 0.5 * (1.0 - 4.0));
  std::vector<double> lo = {0.0, 0.0, 0.0}, hi = {2.0, 2.0, 2.0};
  t.clamp(y.data(), lo.data(), hi.data(), out.data(), 3);
  CHECK(out[0] == 2.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 2.0);
}

TEST_CASE("dot agrees with a long-double reference") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = rng.uniform_int(300);
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);
    long double ref = 0.0L;
    for (std::size_t i = 0; i < n; ++i)
      ref += static_cast<long double>(x[i]) * static_cast<long double>(y[i]);
    const double got = kn::dot(x.data(), y.data(), n);
    CHECK(got == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
  }
}

// Every SIMD variant must agree with the scalar reference bit-for-bit: the
// element-wise kernels run identical IEEE ops per lane, and the reductions
// share the stride-4 accumulation tree.
TEST_CASE("simd variants are bit-identical to the scalar reference") {
  std::vector<kn::Isa> variants;
  for (kn::Isa isa : {kn::Isa::avx2, kn::Isa::neon})
    if (kn::isa_available(isa)) variants.push_back(isa);
  if (variants.empty()) {
    MESSAGE("no SIMD variant available on this host; scalar-only");
    return;
  }
  const kn::Table& ref = kn::table_for(kn::Isa::scalar);
  Rng rng(11);
  for (kn::Isa isa : variants) {
    const kn::Table& simd = kn::table_for(isa);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 64u, 67u, 255u}) {
      const auto x = random_vec(rng, n);
      const auto y = random_vec(rng, n);
      const double a = rng.uniform(-2.0, 2.0);

      const double d_ref = ref.dot(x.data(), y.data(), n);
      const double d_simd = simd.dot(x.data(), y.data(), n);
      CHECK(std::memcmp(&d_ref, &d_simd, sizeof(double)) == 0);

      std::vector<double> o1(n), o2(n);
      ref.scale(a, x.data(), o1.data(), n);
      simd.scale(a, x.data(), o2.data(), n);
      CHECK(bits_equal(o1, o2));
      ref.add(x.data(), y.data(), o1.data(), n);
      simd.add(x.data(), y.data(), o2.data(), n);
      CHECK(bits_equal(o1, o2));
      ref.sub(x.data(), y.data(), o1.data(), n);
      simd.sub(x.data(), y.data(), o2.data(), n);
      CHECK(bits_equal(o1, o2));
      ref.sub_scaled(x.data(), a, y.data(), o1.data(), n);
      simd.sub_scaled(x.data(), a, y.data(), o2.data(), n);
      CHECK(bits_equal(o1, o2));
      ref.extrapolate(x.data(), y.data(), a, o1.data(), n);
      simd.extrapolate(x.data(), y.data(), a, o2.data(), n);
      CHECK(bits_equal(o1, o2));

      auto y1 = y, y2 = y;
      ref.axpy(a, x.data(), y1.data(), n);
      simd.axpy(a, x.data(), y2.data(), n);
      CHECK(bits_equal(y1, y2));

      auto lo = random_vec(rng, n, 1.0);
      auto hi = lo;
      for (double& v : hi) v += 1.5;
      ref.clamp(x.data(), lo.data(), hi.data(), o1.data(), n);
      simd.clamp(x.data(), lo.data(), hi.data(), o2.data(), n);
      CHECK(bits_equal(o1, o2));
    }
  }
}

TEST_CASE("force() switches the active variant and back") {
  const kn::Isa before = kn::active();
  kn::force(kn::Isa::scalar);
  CHECK(kn::active() == kn::Isa::scalar);
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(kn::dot(x.data(), x.data(), 5) == doctest::Approx(55.0));
  kn::force(before);
  CHECK(kn::active() == before);
}
