#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "gevflow/prandtl.hpp"
#include "gevflow/hns.hpp"
#include "gevflow/simd.hpp"
#include "test_util.hpp"

using namespace gevflow;

namespace {

std::vector<double> randv(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct BackendGuard {
  simd::Backend saved = simd::backend();
  ~BackendGuard() { simd::set_backend(saved); }
};

}  // namespace

TEST_CASE("AVX2 kernels match the scalar reference bit for bit") {
  const simd::Kernels* v = simd::avx2_kernels();
  if (!v || !simd::avx2_available()) {
    MESSAGE("AVX2 not available; equivalence not exercised");
    return;
  }
  const simd::Kernels& s = simd::scalar_kernels();
  std::mt19937_64 rng(3);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 33u, 130u, 1027u}) {
    const auto x = randv(rng, n), y = randv(rng, n), z = randv(rng, n), w = randv(rng, n);
    std::vector<double> a(n), b(n);

    a = y; b = y;
    s.axpy(0.37, x.data(), a.data(), n);
    v->axpy(0.37, x.data(), b.data(), n);
    CHECK(same_bits(a, b));

    s.add_scaled(x.data(), -1.3, y.data(), a.data(), n);
    v->add_scaled(x.data(), -1.3, y.data(), b.data(), n);
    CHECK(same_bits(a, b));

    s.mul(x.data(), y.data(), a.data(), n);
    v->mul(x.data(), y.data(), b.data(), n);
    CHECK(same_bits(a, b));

    s.mul_add_mul(x.data(), y.data(), z.data(), w.data(), a.data(), n);
    v->mul_add_mul(x.data(), y.data(), z.data(), w.data(), b.data(), n);
    CHECK(same_bits(a, b));

    s.stencil3(x.data(), y.data(), z.data(), 0.5, -2.0, 1.25, a.data(), n);
    v->stencil3(x.data(), y.data(), z.data(), 0.5, -2.0, 1.25, b.data(), n);
    CHECK(same_bits(a, b));

    const double ss = s.sum_squares(x.data(), n), vs = v->sum_squares(x.data(), n);
    CHECK(vs == doctest::Approx(ss).epsilon(1e-14));
  }
  for (std::size_t modes : {1u, 2u, 5u, 8u, 65u}) {
    const auto z = randv(rng, 2 * modes), mult = randv(rng, modes);
    std::vector<double> a = z, b = z;
    s.scale_modes(a.data(), mult.data(), modes);
    v->scale_modes(b.data(), mult.data(), modes);
    CHECK(same_bits(a, b));
    std::vector<double> c(2 * modes), d(2 * modes);
    s.imag_scale_modes(z.data(), mult.data(), c.data(), modes);
    v->imag_scale_modes(z.data(), mult.data(), d.data(), modes);
    CHECK(same_bits(c, d));
    // i * m * (re + i im) = -m im + i m re
    CHECK(c[0] == -mult[0] * z[1]);
    CHECK(c[1] == mult[0] * z[0]);
  }
}

TEST_CASE("backend selection") {
  BackendGuard guard;
  CHECK(simd::set_backend(simd::Backend::Scalar));
  CHECK(simd::backend() == simd::Backend::Scalar);
  CHECK(simd::backend_name(simd::Backend::Scalar) == "scalar");
  if (simd::avx2_available()) {
    CHECK(simd::set_backend(simd::Backend::Avx2));
    CHECK(simd::backend() == simd::Backend::Avx2);
  } else {
    CHECK_FALSE(simd::set_backend(simd::Backend::Avx2));
  }
}

TEST_CASE("solver trajectories are identical under both backends") {
  if (!simd::avx2_available()) return;
  BackendGuard guard;
  std::mt19937_64 rng(11);
  const Grid g(2.0 * kPi, 32, 17);
  const Field u0 = 0.05 * testing::random_compatible(g, rng, 6);
  auto run = [&](simd::Backend b) {
    simd::set_backend(b);
    prandtl::State p{u0, Field(g), 0.0};
    for (int i = 0; i < 20; ++i) p = prandtl::step(p, 0.01);
    hns::Solver solver(g, 0.2);
    hns::State h = hns::make_hns_data(u0, Field(g), 0.2);
    for (int i = 0; i < 20; ++i) h = solver.step(h, 0.01);
    return std::pair{p.u, h.v};
  };
  const auto [ps, hs] = run(simd::Backend::Scalar);
  const auto [pv, hv] = run(simd::Backend::Avx2);
  // Norms go through sum_squares, but the states themselves must agree bit for bit.
  CHECK(std::memcmp(ps.raw(), pv.raw(), ps.raw_size() * sizeof(double)) == 0);
  CHECK(std::memcmp(hs.raw(), hv.raw(), hs.raw_size() * sizeof(double)) == 0);
}
