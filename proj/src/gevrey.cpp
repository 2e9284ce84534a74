#include "gevflow/gevrey.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

namespace gevflow::gevrey {

void GevreyParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("gevrey: radius a must be > 0");
  if (!(lambda >= 1.0) || !std::isfinite(lambda))
    throw std::invalid_argument("gevrey: lambda must be >= 1");
  if (!(poincare > 0.0) || !std::isfinite(poincare))
    throw std::invalid_argument("gevrey: Poincare constant must be > 0");
}

double GevreyParams::kappa() const {
  return std::min(1.0 / 6.0, 1.0 / (4.0 * (1.0 + poincare)));
}

double GevreyParams::delta() const {
  const double r = a * kappa() / (4.0 * lambda);
  return r * r;
}

double GevreyParams::theta(double t) const {
  if (t < 0.0) throw std::invalid_argument("gevrey: theta needs t >= 0");
  const double k = kappa();
  return 2.0 * std::sqrt(delta()) / k * -std::expm1(-0.5 * k * t);
}

double GevreyParams::theta_dot(double t) const {
  if (t < 0.0) throw std::invalid_argument("gevrey: theta_dot needs t >= 0");
  return std::sqrt(delta()) * std::exp(-0.5 * kappa() * t);
}

double GevreyParams::radius(double t) const { return a - lambda * theta(t); }

double GevreyParams::phase(double t, double xi) const {
  return radius(t) * std::sqrt(std::abs(xi));
}

namespace {

Weighted weight_modes(const Field& f, double radius, int sign) {
  const Grid& g = f.grid();
  const int nyq = g.nx() / 2;
  const double nyq_phase = radius * std::sqrt(std::abs(g.xi(nyq)));
  constexpr double kLogMax = 709.0;  // log(DBL_MAX) ~ 709.78
  if (sign > 0 && nyq_phase > kLogMax)
    throw gevrey_overflow("apply_gevrey: exp(Phi) overflows at the Nyquist "
                          "frequency, Phi = " + std::to_string(nyq_phase),
                          nyq_phase);

  Weighted out{f, 0.0, 0};
  const double scale = max_modulus(f);
  if (scale == 0.0) return out;

  std::vector<double> peak(g.modes(), 0.0);
  for (int j = 0; j < g.ny(); ++j) {
    auto r = out.field.row(j);
    for (int m = 0; m < g.modes(); ++m) {
      if (sign > 0 && std::abs(r[m]) < kSpectralFloor * scale) {
        if (r[m] != cplx{}) ++out.masked;
        r[m] = {};
      }
      peak[m] = std::max(peak[m], std::abs(r[m]));
    }
  }
  std::vector<double> mult(g.modes());
  for (int m = 0; m < g.modes(); ++m) {
    const double ph = radius * std::sqrt(std::abs(g.xi(m)));
    mult[m] = std::exp(sign > 0 ? ph : -ph);
    if (sign > 0 && peak[m] > 0.0 && ph + std::log(peak[m] / scale) > -3.0)
      out.trust_horizon = std::max(out.trust_horizon, std::abs(g.xi(m)));
  }
  for (int j = 0; j < g.ny(); ++j) {
    auto r = out.field.row(j);
    for (int m = 0; m < g.modes(); ++m) r[m] *= mult[m];
  }
  return out;
}

}  // namespace

Weighted apply_gevrey(const Field& f, double t, const GevreyParams& p, int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("apply_gevrey: sign must be +1 or -1");
  return weight_modes(f, p.radius(t), sign);
}

Field initial_weight(const Field& f, const GevreyParams& p) {
  return weight_modes(f, p.a, +1).field;
}

Profile parse_profile(const std::string& name) {
  if (name == "sin2pi") return Profile::Sin2Pi;
  if (name == "sin4pi") return Profile::Sin4Pi;
  if (name == "sinpi_sin2pi") return Profile::SinPiSin2Pi;
  throw std::invalid_argument("unknown vertical profile '" + name +
                              "' (expected sin2pi, sin4pi, sinpi_sin2pi)");
}

std::string to_string(Profile p) {
  switch (p) {
    case Profile::Sin2Pi: return "sin2pi";
    case Profile::Sin4Pi: return "sin4pi";
    case Profile::SinPiSin2Pi: return "sinpi_sin2pi";
  }
  return "?";
}

double profile_value(Profile p, double y) {
  switch (p) {
    case Profile::Sin2Pi: return std::sin(2.0 * kPi * y);
    case Profile::Sin4Pi: return std::sin(4.0 * kPi * y);
    case Profile::SinPiSin2Pi: return std::sin(kPi * y) * std::sin(2.0 * kPi * y);
  }
  return 0.0;
}

GevreyData make_gevrey_data(const Grid& g, const GevreyParams& p,
                            double amplitude, int m_max,
                            const std::vector<double>& prof) {
  p.validate();
  if (static_cast<int>(prof.size()) != g.ny())
    throw std::invalid_argument("make_gevrey_data: profile has " +
                                std::to_string(prof.size()) + " samples, grid has " +
                                std::to_string(g.ny()));
  if (m_max < 0 || m_max > g.dealias_max())
    throw std::invalid_argument("make_gevrey_data: band m_max = " +
                                std::to_string(m_max) + " outside [0, " +
                                std::to_string(g.dealias_max()) + "]");
  double peak = 0.0;
  for (double v : prof) peak = std::max(peak, std::abs(v));
  const double tol = 1e-12 * std::max(peak, 1.0);
  if (std::abs(prof.front()) > tol || std::abs(prof.back()) > tol)
    throw std::invalid_argument("make_gevrey_data: profile must vanish at y = 0 and y = 1");
  const double h = g.dy();
  double mean = 0.5 * h * (prof.front() + prof.back());
  for (int j = 1; j < g.ny() - 1; ++j) mean += h * prof[j];
  if (std::abs(mean) > tol)
    throw std::invalid_argument("make_gevrey_data: profile has nonzero vertical mean " +
                                std::to_string(mean));

  GevreyData d{Field(g), Field(g)};
  for (int m = 1; m <= m_max; ++m) {
    const double c = amplitude * std::exp(-p.a * std::sqrt(std::abs(g.xi(m))));
    for (int j = 1; j < g.ny() - 1; ++j) d.u0.at(m, j) = c * prof[j];
  }
  return d;
}

GevreyData make_gevrey_data(const Grid& g, const GevreyParams& p,
                            double amplitude, int m_max, Profile profile) {
  std::vector<double> prof(g.ny());
  for (int j = 0; j < g.ny(); ++j) prof[j] = profile_value(profile, g.y(j));
  // sin(k pi) is not exactly zero in floating point
  prof.front() = 0.0;
  prof.back() = 0.0;
  return make_gevrey_data(g, p, amplitude, m_max, prof);
}

double initial_norm_H0(const paley::DyadicBank& bank, const Field& u0,
                       const Field& u1, double s, const GevreyParams& p) {
  require_same_grid(u0, u1, "initial_norm_H0");
  const Field w0 = initial_weight(u0, p);
  const Field w1 = initial_weight(u1, p);
  const Field wy = initial_weight(dy(u0), p);
  const Field* triple[] = {&w0, &w1, &wy};
  const double ak = p.a * p.kappa();
  return paley::besov_norm(bank, triple, s) +
         std::sqrt(ak) * paley::besov_norm(bank, w0, s + 0.25) +
         ak * paley::besov_norm(bank, w0, s + 0.5);
}

double initial_norm_H1(const paley::DyadicBank& bank, const Field& u0,
                       const Field& v0, const Field& u1, const Field& v1,
                       double eps, const GevreyParams& p) {
  require_same_grid(u0, v0, "initial_norm_H1");
  const Field a_u = initial_weight(u0, p);
  const Field a_v = initial_weight(eps * v0, p);
  const Field dx_u = initial_weight(eps * dx(u0), p);
  const Field dx_v = initial_weight((eps * eps) * dx(v0), p);
  const Field dy_u = initial_weight(dy(u0), p);
  const Field dy_v = initial_weight(eps * dy(v0), p);
  const Field t_u = initial_weight(u1, p);
  const Field t_v = initial_weight(eps * v1, p);
  const Field* all[] = {&a_u, &a_v, &dx_u, &dx_v, &dy_u, &dy_v, &t_u, &t_v};
  const Field* pair[] = {&a_u, &a_v};
  const double ak = p.a * p.kappa();
  return paley::besov_norm(bank, all, 0.5) +
         std::sqrt(ak) * paley::besov_norm(bank, pair, 0.75) +
         ak * paley::besov_norm(bank, pair, 1.0);
}

}  // namespace gevflow::gevrey
