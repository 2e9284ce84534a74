#include "gevflow/simd.hpp"

namespace gevflow::simd {
namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void add_scaled(const double* x, double a, const double* y, double* out,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * y[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_add_mul(const double* a, const double* b, const double* c,
                 const double* d, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i] + c[i] * d[i];
}

void stencil3(const double* r0, const double* r1, const double* r2, double c0,
              double c1, double c2, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (c0 * r0[i] + c1 * r1[i]) + c2 * r2[i];
}

void scale_modes(double* z, const double* mult, std::size_t nmodes) {
  for (std::size_t m = 0; m < nmodes; ++m) {
    z[2 * m] *= mult[m];
    z[2 * m + 1] *= mult[m];
  }
}

void imag_scale_modes(const double* z, const double* mult, double* out,
                      std::size_t nmodes) {
  for (std::size_t m = 0; m < nmodes; ++m) {
    const double re = z[2 * m];
    const double im = z[2 * m + 1];
    out[2 * m] = -(mult[m] * im);
    out[2 * m + 1] = mult[m] * re;
  }
}

double sum_squares(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

constexpr Kernels kScalar{axpy,        add_scaled,       mul,
                          mul_add_mul, stencil3,         scale_modes,
                          imag_scale_modes, sum_squares};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace gevflow::simd
