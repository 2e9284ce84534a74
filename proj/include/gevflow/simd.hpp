#pragma once
// Data-parallel kernels used by the field operators and the time steppers.
//
// Every kernel has a scalar reference implementation and an AVX2 variant.
// The active table is chosen once at startup from the CPU features and can be
// forced with GEVFLOW_SIMD=scalar|avx2 or set_backend(). Elementwise kernels
// never use FMA, so both backends produce bit-identical results; only
// sum_squares reorders its additions.

#include <cstddef>
#include <string_view>

namespace gevflow::simd {

enum class Backend { Scalar, Avx2 };

struct Kernels {
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out[i] = x[i] + a * y[i]
  void (*add_scaled)(const double* x, double a, const double* y, double* out,
                     std::size_t n);
  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] = a[i] * b[i] + c[i] * d[i]
  void (*mul_add_mul)(const double* a, const double* b, const double* c,
                      const double* d, double* out, std::size_t n);
  // out[i] = c0 * r0[i] + c1 * r1[i] + c2 * r2[i]
  void (*stencil3)(const double* r0, const double* r1, const double* r2,
                   double c0, double c1, double c2, double* out, std::size_t n);
  // Interleaved complex rows: z[m] *= mult[m] for m < nmodes.
  void (*scale_modes)(double* z, const double* mult, std::size_t nmodes);
  // Interleaved complex rows: out[m] = i * mult[m] * z[m].
  void (*imag_scale_modes)(const double* z, const double* mult, double* out,
                           std::size_t nmodes);
  // sum of x[i]^2
  double (*sum_squares)(const double* x, std::size_t n);
};

const Kernels& scalar_kernels();
// Null when the binary was built without AVX2 support.
const Kernels* avx2_kernels();

// Active kernel table.
const Kernels& kernels();
Backend backend();
bool avx2_available();
// Returns false (and leaves the backend unchanged) if the request cannot be met.
bool set_backend(Backend b);
std::string_view backend_name(Backend b);

}  // namespace gevflow::simd
