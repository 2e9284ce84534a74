// AVX2 variants of the kernels in kernels_scalar.cpp. Built with -mavx2 and
// without -mfma: every lane performs the same IEEE operations in the same
// order as the scalar loop.
#include "gevflow/simd.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace gevflow::simd {
namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void add_scaled(const double* x, double a, const double* y, double* out,
                std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(
        _mm256_loadu_pd(x + i), _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = x[i] + a * y[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_add_mul(const double* a, const double* b, const double* c,
                 const double* d, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ab =
        _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d cd =
        _mm256_mul_pd(_mm256_loadu_pd(c + i), _mm256_loadu_pd(d + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(ab, cd));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i] + c[i] * d[i];
}

void stencil3(const double* r0, const double* r1, const double* r2, double c0,
              double c1, double c2, double* out, std::size_t n) {
  const __m256d v0 = _mm256_set1_pd(c0);
  const __m256d v1 = _mm256_set1_pd(c1);
  const __m256d v2 = _mm256_set1_pd(c2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_add_pd(_mm256_mul_pd(v0, _mm256_loadu_pd(r0 + i)),
                              _mm256_mul_pd(v1, _mm256_loadu_pd(r1 + i)));
    s = _mm256_add_pd(s, _mm256_mul_pd(v2, _mm256_loadu_pd(r2 + i)));
    _mm256_storeu_pd(out + i, s);
  }
  for (; i < n; ++i) out[i] = (c0 * r0[i] + c1 * r1[i]) + c2 * r2[i];
}

// Two complex values per register: (re0, im0, re1, im1).
inline __m256d dup_pairs(const double* mult) {
  const __m128d m = _mm_loadu_pd(mult);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(m), 0b01010000);
}

void scale_modes(double* z, const double* mult, std::size_t nmodes) {
  std::size_t m = 0;
  for (; m + 2 <= nmodes; m += 2) {
    const __m256d vm = dup_pairs(mult + m);
    _mm256_storeu_pd(z + 2 * m, _mm256_mul_pd(_mm256_loadu_pd(z + 2 * m), vm));
  }
  for (; m < nmodes; ++m) {
    z[2 * m] *= mult[m];
    z[2 * m + 1] *= mult[m];
  }
}

void imag_scale_modes(const double* z, const double* mult, double* out,
                      std::size_t nmodes) {
  // (re, im) -> (-(c*im), c*re)
  const __m256d sign = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
  std::size_t m = 0;
  for (; m + 2 <= nmodes; m += 2) {
    const __m256d vm = dup_pairs(mult + m);
    const __m256d swapped = _mm256_permute_pd(_mm256_loadu_pd(z + 2 * m), 0b0101);
    const __m256d prod = _mm256_mul_pd(vm, swapped);
    _mm256_storeu_pd(out + 2 * m, _mm256_xor_pd(prod, sign));
  }
  for (; m < nmodes; ++m) {
    const double re = z[2 * m];
    const double im = z[2 * m + 1];
    out[2 * m] = -(mult[m] * im);
    out[2 * m + 1] = mult[m] * re;
  }
}

double sum_squares(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

constexpr Kernels kAvx2{axpy,        add_scaled,       mul,
                        mul_add_mul, stencil3,         scale_modes,
                        imag_scale_modes, sum_squares};

}  // namespace

const Kernels* avx2_kernels() { return &kAvx2; }

}  // namespace gevflow::simd

#else

namespace gevflow::simd {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace gevflow::simd

#endif
