#include "gevflow/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <utility>

#include "gevflow/simd.hpp"

namespace gevflow {

Grid::Grid(double lx, int nx, int ny) : lx_(lx), nx_(nx), ny_(ny) {
  if (!(lx > 0.0) || !std::isfinite(lx))
    throw std::invalid_argument("grid: Lx must be positive and finite");
  if (nx < 4 || nx % 2 != 0)
    throw std::invalid_argument("grid: Nx must be even and >= 4, got " +
                                std::to_string(nx));
  if (ny < 9)
    throw std::invalid_argument("grid: Ny must be >= 9, got " +
                                std::to_string(ny));
}

std::string describe(const Grid& g) {
  std::ostringstream os;
  os << "Lx=" << g.lx() << " Nx=" << g.nx() << " Ny=" << g.ny();
  return os.str();
}

void Field::set_zero() { std::fill(data_.begin(), data_.end(), cplx{}); }

void require_same_grid(const Field& a, const Field& b, const char* op) {
  if (!a.same_grid(b))
    throw shape_error(std::string(op) + ": grid mismatch (" +
                      describe(a.grid()) + " vs " + describe(b.grid()) + ")");
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o, "Field::operator+=");
  simd::kernels().axpy(1.0, o.raw(), raw(), raw_size());
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o, "Field::operator-=");
  simd::kernels().axpy(-1.0, o.raw(), raw(), raw_size());
  return *this;
}

Field& Field::operator*=(double c) {
  for (auto& z : data_) z *= c;
  return *this;
}

Field& Field::axpy(double a, const Field& o) {
  require_same_grid(*this, o, "Field::axpy");
  simd::kernels().axpy(a, o.raw(), raw(), raw_size());
  return *this;
}

// ---- transforms ----------------------------------------------------------

namespace {

// Batched r2c / c2r plans for one (Nx, Ny), with private aligned buffers.
class Transform {
 public:
  Transform(int nx, int ny) : nx_(nx), ny_(ny), modes_(nx / 2 + 1) {
    real_ = fftw_alloc_real(static_cast<std::size_t>(nx) * ny);
    spec_ = fftw_alloc_complex(static_cast<std::size_t>(modes_) * ny);
    int n[] = {nx};
    static std::mutex planner;
    std::lock_guard<std::mutex> lock(planner);
    forward_ = fftw_plan_many_dft_r2c(1, n, ny, real_, nullptr, 1, nx, spec_,
                                      nullptr, 1, modes_, FFTW_ESTIMATE);
    backward_ = fftw_plan_many_dft_c2r(1, n, ny, spec_, nullptr, 1, modes_,
                                       real_, nullptr, 1, nx, FFTW_ESTIMATE);
  }
  ~Transform() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  void forward(const double* in, cplx* out) {
    std::copy_n(in, static_cast<std::size_t>(nx_) * ny_, real_);
    fftw_execute(forward_);
    const double inv = 1.0 / nx_;
    const std::size_t n = static_cast<std::size_t>(modes_) * ny_;
    auto* src = reinterpret_cast<const cplx*>(spec_);
    for (std::size_t k = 0; k < n; ++k) out[k] = src[k] * inv;
  }

  void backward(const cplx* in, double* out) {
    std::copy_n(in, static_cast<std::size_t>(modes_) * ny_,
                reinterpret_cast<cplx*>(spec_));
    fftw_execute(backward_);
    std::copy_n(real_, static_cast<std::size_t>(nx_) * ny_, out);
  }

 private:
  int nx_, ny_, modes_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

Transform& transform_for(const Grid& g) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<Transform>> cache;
  auto& slot = cache[{g.nx(), g.ny()}];
  if (!slot) slot = std::make_unique<Transform>(g.nx(), g.ny());
  return *slot;
}

void check_physical(const PhysicalField& v) {
  const std::size_t expect =
      static_cast<std::size_t>(v.grid.nx()) * static_cast<std::size_t>(v.grid.ny());
  if (v.values.size() != expect) {
    std::ostringstream os;
    os << "to_spectral: expected " << v.grid.nx() << "x" << v.grid.ny() << " = "
       << expect << " values, got " << v.values.size();
    throw shape_error(os.str());
  }
}

}  // namespace

Field to_spectral(const PhysicalField& v) {
  check_physical(v);
  Field f(v.grid);
  transform_for(v.grid).forward(v.values.data(), f.coeffs().data());
  return f;
}

PhysicalField to_physical(const Field& f) {
  PhysicalField v(f.grid());
  transform_for(f.grid()).backward(f.coeffs().data(), v.values.data());
  return v;
}

// ---- horizontal operators -------------------------------------------------

namespace {

template <class Symbol>
std::vector<double> symbol_table(const Grid& g, Symbol&& sym) {
  std::vector<double> mult(g.modes());
  for (int m = 0; m < g.modes(); ++m) mult[m] = sym(m);
  return mult;
}

void scale_rows(Field& f, const std::vector<double>& mult) {
  const auto& k = simd::kernels();
  for (int j = 0; j < f.ny(); ++j)
    k.scale_modes(reinterpret_cast<double*>(f.row(j).data()), mult.data(),
                  mult.size());
}

}  // namespace

Field dx(const Field& f) {
  const Grid& g = f.grid();
  const int nyq = g.nx() / 2;
  const auto mult =
      symbol_table(g, [&](int m) { return m == nyq ? 0.0 : g.xi(m); });
  Field out(g);
  const auto& k = simd::kernels();
  for (int j = 0; j < f.ny(); ++j)
    k.imag_scale_modes(reinterpret_cast<const double*>(f.row(j).data()),
                       mult.data(), reinterpret_cast<double*>(out.row(j).data()),
                       mult.size());
  return out;
}

Field dxx(const Field& f) {
  const Grid& g = f.grid();
  Field out = f;
  scale_rows(out, symbol_table(g, [&](int m) { return -g.xi(m) * g.xi(m); }));
  return out;
}

Field frac_dx(const Field& f, double s) {
  const Grid& g = f.grid();
  Field out = f;
  scale_rows(out, symbol_table(g, [&](int m) {
               if (m == 0) return s == 0.0 ? 1.0 : 0.0;
               return std::pow(std::abs(g.xi(m)), s);
             }));
  return out;
}

void dealias(Field& f) {
  const int keep = f.grid().dealias_max();
  for (int j = 0; j < f.ny(); ++j) {
    auto r = f.row(j);
    std::fill(r.begin() + keep + 1, r.end(), cplx{});
  }
}

// ---- vertical operators ---------------------------------------------------

namespace {

double* row_ptr(Field& f, int j) { return reinterpret_cast<double*>(f.row(j).data()); }
const double* row_ptr(const Field& f, int j) {
  return reinterpret_cast<const double*>(f.row(j).data());
}

}  // namespace

Field dy(const Field& f) {
  const Grid& g = f.grid();
  const int ny = g.ny();
  const std::size_t n = 2 * static_cast<std::size_t>(g.modes());
  const double h = 0.5 / g.dy();
  const auto& k = simd::kernels();
  Field out(g);
  k.stencil3(row_ptr(f, 0), row_ptr(f, 1), row_ptr(f, 2), -3.0 * h, 4.0 * h,
             -h, row_ptr(out, 0), n);
  for (int j = 1; j < ny - 1; ++j)
    k.stencil3(row_ptr(f, j - 1), row_ptr(f, j), row_ptr(f, j + 1), -h, 0.0, h,
               row_ptr(out, j), n);
  k.stencil3(row_ptr(f, ny - 3), row_ptr(f, ny - 2), row_ptr(f, ny - 1), h,
             -4.0 * h, 3.0 * h, row_ptr(out, ny - 1), n);
  return out;
}

Field dyy(const Field& f) {
  const Grid& g = f.grid();
  const int ny = g.ny();
  const std::size_t n = 2 * static_cast<std::size_t>(g.modes());
  const double h2 = 1.0 / (g.dy() * g.dy());
  const auto& k = simd::kernels();
  Field out(g);
  for (int j = 1; j < ny - 1; ++j)
    k.stencil3(row_ptr(f, j - 1), row_ptr(f, j), row_ptr(f, j + 1), h2,
               -2.0 * h2, h2, row_ptr(out, j), n);
  // (2 f0 - 5 f1 + 4 f2 - f3) / dy^2, mirrored at the top wall
  k.stencil3(row_ptr(f, 0), row_ptr(f, 1), row_ptr(f, 2), 2.0 * h2, -5.0 * h2,
             4.0 * h2, row_ptr(out, 0), n);
  k.axpy(-h2, row_ptr(f, 3), row_ptr(out, 0), n);
  k.stencil3(row_ptr(f, ny - 1), row_ptr(f, ny - 2), row_ptr(f, ny - 3),
             2.0 * h2, -5.0 * h2, 4.0 * h2, row_ptr(out, ny - 1), n);
  k.axpy(-h2, row_ptr(f, ny - 4), row_ptr(out, ny - 1), n);
  return out;
}

Field integrate_y(const Field& f) {
  const Grid& g = f.grid();
  const std::size_t n = 2 * static_cast<std::size_t>(g.modes());
  const double half = 0.5 * g.dy();
  const auto& k = simd::kernels();
  Field out(g);
  for (int j = 1; j < g.ny(); ++j) {
    double* o = row_ptr(out, j);
    k.add_scaled(row_ptr(out, j - 1), half, row_ptr(f, j - 1), o, n);
    k.axpy(half, row_ptr(f, j), o, n);
  }
  return out;
}

std::vector<cplx> mean_y(const Field& f) {
  const Grid& g = f.grid();
  std::vector<cplx> out(g.modes());
  const double h = g.dy();
  for (int j = 0; j < g.ny(); ++j) {
    const double w = (j == 0 || j == g.ny() - 1) ? 0.5 * h : h;
    auto r = f.row(j);
    for (int m = 0; m < g.modes(); ++m) out[m] += w * r[m];
  }
  return out;
}

// ---- products and norms ---------------------------------------------------

Field product(const Field& a, const Field& b) {
  require_same_grid(a, b, "product");
  const PhysicalField pa = to_physical(a);
  PhysicalField pb = to_physical(b);
  simd::kernels().mul(pa.values.data(), pb.values.data(), pb.values.data(),
                      pb.values.size());
  Field out = to_spectral(pb);
  dealias(out);
  return out;
}

Field product_sum(const Field& a, const Field& b, const Field& c,
                  const Field& d) {
  require_same_grid(a, b, "product_sum");
  require_same_grid(a, c, "product_sum");
  require_same_grid(a, d, "product_sum");
  const PhysicalField pa = to_physical(a);
  const PhysicalField pb = to_physical(b);
  const PhysicalField pc = to_physical(c);
  PhysicalField pd = to_physical(d);
  simd::kernels().mul_add_mul(pa.values.data(), pb.values.data(),
                              pc.values.data(), pd.values.data(),
                              pd.values.data(), pd.values.size());
  Field out = to_spectral(pd);
  dealias(out);
  return out;
}

namespace {

// Lx * sum over the full spectrum of |c_m|^2 for one row.
double row_energy(const Field& f, int j) {
  const Grid& g = f.grid();
  auto r = f.row(j);
  const double all = simd::kernels().sum_squares(
      reinterpret_cast<const double*>(r.data()), 2 * r.size());
  const double c0 = std::norm(r[0]);
  const double cn = std::norm(r[g.nx() / 2]);
  return g.lx() * (2.0 * all - c0 - cn);
}

}  // namespace

double l2_norm_sq(const Field& f) {
  const Grid& g = f.grid();
  const double h = g.dy();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    const double w = (j == 0 || j == g.ny() - 1) ? 0.5 * h : h;
    s += w * row_energy(f, j);
  }
  return s;
}

double l2_norm(const Field& f) { return std::sqrt(l2_norm_sq(f)); }

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g, "inner");
  const Grid& gr = f.grid();
  const int nyq = gr.nx() / 2;
  const double h = gr.dy();
  double s = 0.0;
  for (int j = 0; j < gr.ny(); ++j) {
    const double w = (j == 0 || j == gr.ny() - 1) ? 0.5 * h : h;
    auto a = f.row(j);
    auto b = g.row(j);
    double r = 0.0;
    for (int m = 0; m <= nyq; ++m) {
      const double term = (a[m] * std::conj(b[m])).real();
      r += (m == 0 || m == nyq) ? term : 2.0 * term;
    }
    s += w * gr.lx() * r;
  }
  return s;
}

double l2_norm_sq_physical(const PhysicalField& v) {
  const Grid& g = v.grid;
  const double hx = g.lx() / g.nx();
  const double h = g.dy();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    const double w = (j == 0 || j == g.ny() - 1) ? 0.5 * h : h;
    double r = 0.0;
    for (int i = 0; i < g.nx(); ++i) r += v.at(i, j) * v.at(i, j);
    s += w * hx * r;
  }
  return s;
}

double max_modulus(const Field& f) {
  double m = 0.0;
  for (const auto& z : f.coeffs()) m = std::max(m, std::abs(z));
  return m;
}

double realness_defect(const Field& f) {
  const double scale = max_modulus(f);
  if (scale == 0.0) return 0.0;
  const int nyq = f.grid().nx() / 2;
  double d = 0.0;
  for (int j = 0; j < f.ny(); ++j)
    d = std::max({d, std::abs(f.at(0, j).imag()), std::abs(f.at(nyq, j).imag())});
  return d / scale;
}

bool all_finite(const Field& f) {
  for (const auto& z : f.coeffs())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace gevflow
