#pragma once
// Periodic-in-x, bounded-in-y grid and the spectral-in-x / collocated-in-y
// field representation shared by every other module.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gevflow {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Strip [0, Lx) x [0, 1]: Nx Fourier collocation points in x, Ny uniform
/// nodes in y including both walls.
class Grid {
 public:
  Grid() = default;
  /// Throws std::invalid_argument unless Lx > 0, Nx even (>= 4), Ny >= 9.
  Grid(double lx, int nx, int ny);

  double lx() const { return lx_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  /// Stored modes m = 0..Nx/2 (the negative half is implied by realness).
  int modes() const { return nx_ / 2 + 1; }
  double dy() const { return 1.0 / (ny_ - 1); }
  double y(int j) const { return j == ny_ - 1 ? 1.0 : j * dy(); }
  double x(int i) const { return lx_ * i / nx_; }
  /// xi_m = 2*pi*m/Lx; valid for negative m too.
  double xi(int m) const { return 2.0 * kPi * m / lx_; }
  /// Largest |m| kept by the 2/3 rule: products of kept modes never alias
  /// back onto kept modes.
  int dealias_max() const { return (nx_ - 1) / 3; }
  std::size_t size() const {
    return static_cast<std::size_t>(modes()) * static_cast<std::size_t>(ny_);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double lx_ = 2.0 * kPi;
  int nx_ = 0;
  int ny_ = 0;
};

std::string describe(const Grid& g);

/// Real values on the Nx x Ny collocation points, stored row-major by y:
/// values[j * Nx + i] = v(x_i, y_j).
struct PhysicalField {
  Grid grid;
  std::vector<double> values;

  PhysicalField() = default;
  explicit PhysicalField(const Grid& g)
      : grid(g), values(static_cast<std::size_t>(g.nx()) * g.ny(), 0.0) {}
  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * grid.nx() + i]; }
  double at(int i, int j) const {
    return values[static_cast<std::size_t>(j) * grid.nx() + i];
  }
};

/// Fourier coefficients in x at every y node. Row j holds the half spectrum
/// c_0..c_{Nx/2} of v(., y_j) = sum_m c_m exp(i xi_m x). The field always
/// represents a real function, so c_{-m} = conj(c_m).
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g) : grid_(g), data_(g.size()) {}

  const Grid& grid() const { return grid_; }
  int ny() const { return grid_.ny(); }
  int modes() const { return grid_.modes(); }

  cplx& at(int m, int j) { return data_[index(m, j)]; }
  const cplx& at(int m, int j) const { return data_[index(m, j)]; }
  /// Coefficient for any m in (-Nx/2, Nx/2], using conjugate symmetry.
  cplx coeff(int m, int j) const {
    return m >= 0 ? at(m, j) : std::conj(at(-m, j));
  }

  std::span<cplx> row(int j) {
    return {data_.data() + static_cast<std::size_t>(j) * modes(),
            static_cast<std::size_t>(modes())};
  }
  std::span<const cplx> row(int j) const {
    return {data_.data() + static_cast<std::size_t>(j) * modes(),
            static_cast<std::size_t>(modes())};
  }
  std::span<cplx> coeffs() { return data_; }
  std::span<const cplx> coeffs() const { return data_; }
  /// Interleaved (re, im) view used by the SIMD kernels.
  double* raw() { return reinterpret_cast<double*>(data_.data()); }
  const double* raw() const { return reinterpret_cast<const double*>(data_.data()); }
  std::size_t raw_size() const { return 2 * data_.size(); }

  void set_zero();
  bool same_grid(const Field& o) const { return grid_ == o.grid_; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double c);
  /// this += a * o
  Field& axpy(double a, const Field& o);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double c, Field a) { return a *= c; }

 private:
  std::size_t index(int m, int j) const {
    return static_cast<std::size_t>(j) * modes() + static_cast<std::size_t>(m);
  }

  Grid grid_;
  std::vector<cplx> data_;
};

class shape_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void require_same_grid(const Field& a, const Field& b, const char* op);

// ---- transforms ----------------------------------------------------------

Field to_spectral(const PhysicalField& v);
PhysicalField to_physical(const Field& f);

// ---- horizontal operators (diagonal in xi) --------------------------------

/// i*xi_m*c; the Nyquist coefficient is dropped.
Field dx(const Field& f);
/// -xi_m^2 * c
Field dxx(const Field& f);
/// |xi_m|^s * c; for s < 0 the m = 0 mode is set to zero.
Field frac_dx(const Field& f, double s);
/// Zeroes modes with m > grid.dealias_max().
void dealias(Field& f);

// ---- vertical operators ---------------------------------------------------

/// Centered second-order differences inside, second-order one-sided rows at
/// the walls.
Field dy(const Field& f);
Field dyy(const Field& f);
/// Cumulative trapezoidal integral from y = 0; row 0 is zero.
Field integrate_y(const Field& f);
/// Per-mode trapezoidal integral over [0, 1].
std::vector<cplx> mean_y(const Field& f);

// ---- products and norms ---------------------------------------------------

/// Pseudo-spectral product followed by 2/3-rule truncation.
Field product(const Field& a, const Field& b);
/// a*b + c*d with one dealiasing pass.
Field product_sum(const Field& a, const Field& b, const Field& c,
                  const Field& d);

/// Squared L2 norm on the torus-strip: Parseval in x (period Lx), trapezoid
/// in y.
double l2_norm_sq(const Field& f);
double l2_norm(const Field& f);
/// Re (f|g)_{L2}
double inner(const Field& f, const Field& g);
/// Squared L2 norm computed from physical values with the rectangle rule in
/// x and the trapezoid rule in y. Independent of the spectral route.
double l2_norm_sq_physical(const PhysicalField& v);

/// Largest modulus over all stored coefficients.
double max_modulus(const Field& f);
/// Relative size of the conjugate-symmetry defect of the modes that must be
/// real (m = 0 and, for even Nx, the Nyquist mode).
double realness_defect(const Field& f);
bool all_finite(const Field& f);

}  // namespace gevflow
