#include "gevflow/prandtl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gevflow/simd.hpp"
#include "detail.hpp"

namespace gevflow::prandtl {

Field recover_v(const Field& u) {
  Field v = integrate_y(dx(u));
  v *= -1.0;
  return v;
}

double top_residual(const Field& v) {
  double r = 0.0;
  for (const auto& z : v.row(v.ny() - 1)) r = std::max(r, std::abs(z));
  return r;
}

Field pressure_gradient(const Field& u, double factor) {
  const Grid& g = u.grid();
  const int ny = g.ny();
  const double h = g.dy();
  const auto sq_mean = mean_y(product(u, u));
  Field out(g);
  std::vector<cplx> px(g.modes());
  for (int m = 1; m < g.modes(); ++m) {
    const cplx top = (3.0 * u.at(m, ny - 1) - 4.0 * u.at(m, ny - 2) + u.at(m, ny - 3)) / (2.0 * h);
    const cplx bot = (-3.0 * u.at(m, 0) + 4.0 * u.at(m, 1) - u.at(m, 2)) / (2.0 * h);
    px[m] = top - bot - factor * cplx(0.0, g.xi(m)) * sq_mean[m];
  }
  px[g.nx() / 2] = 0.0;
  for (int j = 0; j < ny; ++j)
    std::copy(px.begin(), px.end(), out.row(j).begin());
  return out;
}

Field compatible_pressure_gradient(const Field& accel) {
  const Grid& g = accel.grid();
  const int ny = g.ny();
  std::vector<cplx> mean(g.modes());
  for (int j = 1; j < ny - 1; ++j) {
    auto r = accel.row(j);
    for (int m = 0; m < g.modes(); ++m) mean[m] += r[m];
  }
  for (auto& z : mean) z /= static_cast<double>(ny - 2);
  Field out(g);
  for (int j = 0; j < ny; ++j) std::copy(mean.begin(), mean.end(), out.row(j).begin());
  return out;
}

Derivative rhs(const State& s, const Options& opt) {
  require_same_grid(s.u, s.ut, "prandtl::rhs");
  Field accel = dyy(s.u);
  accel -= s.ut;
  if (opt.nonlinear) {
    const Field v = recover_v(s.u);
    accel -= product_sum(s.u, dx(s.u), v, dy(s.u));
  }
  detail::zero_walls(accel);
  if (opt.law == PressureLaw::Compatible) {
    accel -= compatible_pressure_gradient(accel);
  } else {
    accel -= pressure_gradient(s.u, opt.quadratic_factor);
  }
  detail::zero_walls(accel);
  dealias(accel);
  detail::require_finite(accel, "prandtl::rhs dut");
  return {s.ut, std::move(accel)};
}

State step(const State& s, double dt, const Options& opt) {
  const double dy = s.u.grid().dy();
  if (!(dt > 0.0) || dt > opt.max_cfl * dy) {
    std::ostringstream os;
    os << "prandtl::step: dt = " << dt << " violates 0 < dt <= " << opt.max_cfl
       << " * dy = " << opt.max_cfl * dy;
    throw solver_abort(os.str());
  }
  const auto& k = simd::kernels();
  auto stage = [&](const Derivative& d, double a) {
    State out{s.u, s.ut, s.t + a};
    k.axpy(a, d.du.raw(), out.u.raw(), out.u.raw_size());
    k.axpy(a, d.dut.raw(), out.ut.raw(), out.ut.raw_size());
    return out;
  };
  const Derivative k1 = rhs(s, opt);
  const Derivative k2 = rhs(stage(k1, 0.5 * dt), opt);
  const Derivative k3 = rhs(stage(k2, 0.5 * dt), opt);
  const Derivative k4 = rhs(stage(k3, dt), opt);

  State out = s;
  const double w1 = dt / 6.0, w2 = dt / 3.0;
  for (const auto& [d, w] : {std::pair{&k1, w1}, {&k2, w2}, {&k3, w2}, {&k4, w1}}) {
    k.axpy(w, d->du.raw(), out.u.raw(), out.u.raw_size());
    k.axpy(w, d->dut.raw(), out.ut.raw(), out.ut.raw_size());
  }
  out.t = s.t + dt;
  detail::zero_walls(out.u);
  detail::zero_walls(out.ut);
  return out;
}

std::pair<Field, Field> enforce_compatibility(const Field& u0, const Field& u1) {
  require_same_grid(u0, u1, "enforce_compatibility");
  const Grid& g = u0.grid();
  std::vector<double> q(g.ny(), 0.0);
  for (int j = 1; j < g.ny() - 1; ++j) q[j] = std::sin(kPi * g.y(j));
  double qmean = 0.0;
  for (int j = 1; j < g.ny() - 1; ++j) qmean += g.dy() * q[j];
  for (auto& v : q) v /= qmean;

  auto fix = [&](const Field& f) {
    Field out = f;
    const auto mean = mean_y(f);
    for (int j = 1; j < g.ny() - 1; ++j) {
      auto r = out.row(j);
      for (int m = 0; m < g.modes(); ++m) r[m] -= mean[m] * q[j];
    }
    return out;
  };
  return {fix(u0), fix(u1)};
}

double max_vertical_mean(const Field& u) {
  const Grid& g = u.grid();
  const auto c = mean_y(u);
  const int nyq = g.nx() / 2;
  double worst = 0.0;
  for (int i = 0; i < g.nx(); ++i) {
    const double x = g.x(i);
    double s = c[0].real();
    for (int m = 1; m <= nyq; ++m) {
      const double term = (c[m] * std::polar(1.0, g.xi(m) * x)).real();
      s += (m == nyq) ? term : 2.0 * term;
    }
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

double wall_residual(const State& s) {
  const int top = s.u.ny() - 1;
  double r = 0.0;
  for (const Field* f : {&s.u, &s.ut})
    for (int j : {0, top})
      for (const auto& z : f->row(j)) r = std::max(r, std::abs(z));
  return r;
}

void Integrator::advance(State& s, double dt) {
  s = step(s, dt, opt_);
  ++steps_;
  if (opt_.check_every > 0 && steps_ % opt_.check_every == 0) {
    worst_mean_ = std::max(worst_mean_, max_vertical_mean(s.u));
    const Grid& g = s.u.grid();
    const double umax = detail::max_abs_physical(s.u);
    const double vmax = detail::max_abs_physical(recover_v(s.u));
    const double courant =
        dt * (umax * std::abs(g.xi(g.dealias_max())) + vmax / g.dy());
    if (!(courant <= 1.0)) {
      std::ostringstream os;
      os << "prandtl: advective Courant number " << courant << " > 1 at t = " << s.t;
      throw solver_abort(os.str());
    }
  }
}

}  // namespace gevflow::prandtl
