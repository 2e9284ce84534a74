#include "gevflow/hns.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "detail.hpp"
#include "gevflow/simd.hpp"

namespace gevflow::hns {

namespace {

// i xi_m, with the Nyquist mode dropped as in dx().
cplx ixi(const Grid& g, int m) {
  return m == g.nx() / 2 ? cplx{} : cplx(0.0, g.xi(m));
}

double mode_weight(const Grid& g, int m) {
  return (m == 0 || m == g.nx() / 2) ? 1.0 : 2.0;
}

}  // namespace

FaceField divergence(const Field& u, const Field& v) {
  require_same_grid(u, v, "hns::divergence");
  const Grid& g = u.grid();
  const double inv = 1.0 / g.dy();
  FaceField d(g.ny() - 1, g.modes());
  for (int h = 0; h < g.ny() - 1; ++h)
    for (int m = 0; m < g.modes(); ++m)
      d.at(m, h) = (v.at(m, h + 1) - v.at(m, h)) * inv +
                   ixi(g, m) * 0.5 * (u.at(m, h) + u.at(m, h + 1));
  return d;
}

double face_norm(const Grid& g, const FaceField& f) {
  double s = 0.0;
  for (int h = 0; h < f.faces; ++h) {
    double r = 0.0;
    for (int m = 0; m < f.modes; ++m) r += mode_weight(g, m) * std::norm(f.at(m, h));
    s += r;
  }
  return std::sqrt(g.lx() * g.dy() * s);
}

double divergence_ratio(const Field& u, const Field& v) {
  const Grid& g = u.grid();
  const double inv = 1.0 / g.dy();
  FaceField ux(g.ny() - 1, g.modes()), vy(g.ny() - 1, g.modes());
  for (int h = 0; h < g.ny() - 1; ++h)
    for (int m = 0; m < g.modes(); ++m) {
      ux.at(m, h) = ixi(g, m) * 0.5 * (u.at(m, h) + u.at(m, h + 1));
      vy.at(m, h) = (v.at(m, h + 1) - v.at(m, h)) * inv;
    }
  const double scale = face_norm(g, ux) + face_norm(g, vy);
  if (scale == 0.0) return 0.0;
  return face_norm(g, divergence(u, v)) / scale;
}

Solver::Solver(const Grid& g, double eps, Options opt)
    : grid_(g), eps_(eps), opt_(opt) {
  if (!(eps > 0.0) || eps > 1.0)
    throw std::invalid_argument("hns: eps must lie in (0, 1], got " + std::to_string(eps));
}

FaceField Solver::solve_poisson(const FaceField& rhs, double* defect) const {
  const Grid& g = grid_;
  const int nf = g.ny() - 1;
  const double alpha = 1.0 / (eps_ * eps_ * g.dy() * g.dy());
  const int active = g.dealias_max();
  FaceField p(nf, g.modes());

  // m = 0: Neumann problem, solvable once the mean of the data is removed.
  {
    cplx sum{};
    for (int h = 0; h < nf; ++h) sum += rhs.at(0, h);
    if (defect) *defect = std::abs(sum) * g.dy();
    const cplx mean = sum / static_cast<double>(nf);
    cplx flux{};
    cplx pm{};
    p.at(0, 0) = 0.0;
    for (int h = 0; h < nf - 1; ++h) {
      flux += rhs.at(0, h) - mean;
      p.at(0, h + 1) = p.at(0, h) + flux / alpha;
    }
    for (int h = 0; h < nf; ++h) pm += p.at(0, h);
    pm /= static_cast<double>(nf);
    for (int h = 0; h < nf; ++h) p.at(0, h) -= pm;
  }

  std::vector<double> c(nf);
  std::vector<cplx> d(nf);
  for (int m = 1; m <= active; ++m) {
    const double beta = 0.25 * g.xi(m) * g.xi(m);
    const double off = alpha - beta;
    auto diag = [&](int h) {
      return (h == 0 || h == nf - 1) ? -alpha - beta : -2.0 * alpha - 2.0 * beta;
    };
    // Thomas elimination; the matrix is symmetric and strictly dominant at
    // the end rows, so no pivoting is needed for xi != 0.
    double b = diag(0);
    if (b == 0.0) throw std::runtime_error("hns: tridiagonal breakdown");
    c[0] = off / b;
    d[0] = rhs.at(m, 0) / b;
    for (int h = 1; h < nf; ++h) {
      b = diag(h) - off * c[h - 1];
      if (b == 0.0) throw std::runtime_error("hns: tridiagonal breakdown");
      c[h] = off / b;
      d[h] = (rhs.at(m, h) - off * d[h - 1]) / b;
    }
    p.at(m, nf - 1) = d[nf - 1];
    for (int h = nf - 2; h >= 0; --h) p.at(m, h) = d[h] - c[h] * p.at(m, h + 1);
  }
  return p;
}

Pressure Solver::pressure_solve(const Field& f1, const Field& f2) const {
  require_same_grid(f1, f2, "hns::pressure_solve");
  const Grid& g = grid_;
  const int ny = g.ny();
  const double inv = 1.0 / g.dy();
  auto row_value = [&](const Field& f, int m, int j) {
    return (j == 0 || j == ny - 1) ? cplx{} : f.at(m, j);
  };
  FaceField r(ny - 1, g.modes());
  for (int h = 0; h < ny - 1; ++h)
    for (int m = 0; m < g.modes(); ++m)
      r.at(m, h) = (row_value(f2, m, h + 1) - row_value(f2, m, h)) * inv +
                   ixi(g, m) * 0.5 * (row_value(f1, m, h) + row_value(f1, m, h + 1));

  Pressure out;
  out.p = solve_poisson(r, &out.solvability_defect);
  cplx mean{};
  for (int j = 1; j < ny - 1; ++j) mean += f1.at(0, j);
  out.mean_gradient = mean / static_cast<double>(ny - 2);
  return out;
}

void Solver::apply_pressure(const Pressure& p, Field& f1, Field& f2) const {
  const Grid& g = grid_;
  const int ny = g.ny();
  const double vy_scale = 1.0 / (eps_ * eps_ * g.dy());
  for (int j = 1; j < ny - 1; ++j) {
    auto r1 = f1.row(j);
    auto r2 = f2.row(j);
    for (int m = 0; m < g.modes(); ++m) {
      const cplx lo = p.p.at(m, j - 1);
      const cplx hi = p.p.at(m, j);
      r1[m] -= ixi(g, m) * 0.5 * (lo + hi);
      r2[m] -= vy_scale * (hi - lo);
    }
    r1[0] -= p.mean_gradient;
  }
  detail::zero_walls(f1);
  detail::zero_walls(f2);
}

Derivative Solver::rhs(const State& s) {
  const Grid& g = grid_;
  Field f1 = dyy(s.u);
  f1 -= s.ut;
  Field f2(g);
  if (opt_.nonlinear) {
    const Field uy = dy(s.u);
    f1 -= product_sum(s.u, dx(s.u), s.v, uy);
  }

  Field dut(g), dvt(g);
  if (opt_.hydrostatic) {
    detail::zero_walls(f1);
    f1 -= prandtl::compatible_pressure_gradient(f1);
    detail::zero_walls(f1);
    dealias(f1);
    dut = std::move(f1);
    dvt = prandtl::recover_v(dut);
    detail::zero_walls(dvt);
  } else {
    const double e2 = eps_ * eps_;
    f1.axpy(e2, dxx(s.u));
    f2 = dyy(s.v);
    f2 -= s.vt;
    f2.axpy(e2, dxx(s.v));
    if (opt_.nonlinear) f2 -= product_sum(s.u, dx(s.v), s.v, dy(s.v));
    dealias(f1);
    dealias(f2);
    const Pressure p = pressure_solve(f1, f2);
    apply_pressure(p, f1, f2);
    dut = std::move(f1);
    dvt = std::move(f2);
  }
  detail::require_finite(dut, "hns::rhs dut");
  detail::require_finite(dvt, "hns::rhs dvt");
  if (opt_.track_stage_divergence)
    max_stage_div_ = std::max(max_stage_div_, divergence_ratio(dut, dvt));
  return {s.ut, s.vt, std::move(dut), std::move(dvt)};
}

State Solver::step(const State& s, double dt) {
  const double dy = grid_.dy();
  if (!(dt > 0.0) || dt > opt_.max_cfl * dy) {
    std::ostringstream os;
    os << "hns::step: dt = " << dt << " violates 0 < dt <= " << opt_.max_cfl
       << " * dy = " << opt_.max_cfl * dy;
    throw solver_abort(os.str());
  }
  const auto& k = simd::kernels();
  auto fields = [](State& st) { return std::array<Field*, 4>{&st.u, &st.v, &st.ut, &st.vt}; };
  auto derivs = [](const Derivative& d) {
    return std::array<const Field*, 4>{&d.du, &d.dv, &d.dut, &d.dvt};
  };
  auto stage = [&](const Derivative& d, double a) {
    State out = s;
    out.t = s.t + a;
    const auto dst = fields(out);
    const auto src = derivs(d);
    for (int i = 0; i < 4; ++i) k.axpy(a, src[i]->raw(), dst[i]->raw(), dst[i]->raw_size());
    return out;
  };
  const Derivative k1 = rhs(s);
  const Derivative k2 = rhs(stage(k1, 0.5 * dt));
  const Derivative k3 = rhs(stage(k2, 0.5 * dt));
  const Derivative k4 = rhs(stage(k3, dt));

  State out = s;
  const auto dst = fields(out);
  const double w1 = dt / 6.0, w2 = dt / 3.0;
  for (const auto& [d, w] : {std::pair{&k1, w1}, {&k2, w2}, {&k3, w2}, {&k4, w1}}) {
    const auto src = derivs(*d);
    for (int i = 0; i < 4; ++i) k.axpy(w, src[i]->raw(), dst[i]->raw(), dst[i]->raw_size());
  }
  out.t = s.t + dt;
  for (Field* f : dst) detail::zero_walls(*f);
  return out;
}

State Solver::divergence_cleanup(const State& s, double* correction) const {
  const Grid& g = grid_;
  const double vy_scale = 1.0 / (eps_ * eps_ * g.dy());
  State out = s;
  double corr_sq = 0.0;
  for (auto [a, b] : {std::pair{&out.u, &out.v}, {&out.ut, &out.vt}}) {
    const FaceField phi = solve_poisson(divergence(*a, *b));
    Field du(g), dv(g);
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int m = 0; m < g.modes(); ++m) {
        const cplx lo = phi.at(m, j - 1);
        const cplx hi = phi.at(m, j);
        du.at(m, j) = ixi(g, m) * 0.5 * (lo + hi);
        dv.at(m, j) = vy_scale * (hi - lo);
      }
    *a -= du;
    *b -= dv;
    corr_sq += l2_norm_sq(du) + l2_norm_sq(dv);
  }
  if (correction) *correction = std::sqrt(corr_sq);
  return out;
}

State make_hns_data(const Field& u0, const Field& u1, double eps) {
  require_same_grid(u0, u1, "make_hns_data");
  const Grid& g = u0.grid();
  State s{u0, prandtl::recover_v(u0), u1, prandtl::recover_v(u1), eps, 0.0};
  const double xi_max = std::abs(g.xi(g.nx() / 2));
  for (auto [src, v] : {std::pair{&u0, &s.v}, {&u1, &s.vt}}) {
    const double tol = 1e-10 * std::max(max_modulus(*src) * xi_max, 1e-300);
    const double top = prandtl::top_residual(*v);
    if (top > tol)
      throw std::invalid_argument(
          "make_hns_data: data has a nonzero vertical mean; v misses the top "
          "wall by " + std::to_string(top));
    detail::zero_walls(*v);
  }
  detail::zero_walls(s.u);
  detail::zero_walls(s.ut);
  return s;
}

double max_wall(const State& s) {
  double r = 0.0;
  const int top = s.u.ny() - 1;
  for (const Field* f : {&s.u, &s.v, &s.ut, &s.vt})
    for (int j : {0, top})
      for (const auto& z : f->row(j)) r = std::max(r, std::abs(z));
  return r;
}

double energy_norm(const State& s) {
  const double e2 = s.eps * s.eps;
  return std::sqrt(l2_norm_sq(s.u) + e2 * l2_norm_sq(s.v) + l2_norm_sq(s.ut) +
                   e2 * l2_norm_sq(s.vt));
}

void Integrator::advance(State& s, double dt) {
  s = solver_.step(s, dt);
  ++steps_;
  const Options& opt = solver_.options();
  if (opt.n_proj > 0 && steps_ % opt.n_proj == 0)
    s = solver_.divergence_cleanup(s, &last_correction_);
  if (opt.n_check > 0 && steps_ % opt.n_check == 0) {
    worst_div_ = std::max(worst_div_, divergence_ratio(s.u, s.v));
    const double e = energy_norm(s);
    if (last_energy_ > 0.0 && e > 10.0 * last_energy_) {
      std::ostringstream os;
      os << "hns: energy grew from " << last_energy_ << " to " << e
         << " between checks (t = " << s.t << "); dt = " << dt << " is unstable";
      throw solver_abort(os.str());
    }
    last_energy_ = e;
    const Grid& g = s.u.grid();
    const double courant = dt * (detail::max_abs_physical(s.u) *
                                     std::abs(g.xi(g.dealias_max())) +
                                 detail::max_abs_physical(s.v) / g.dy());
    if (!(courant <= 1.0)) {
      std::ostringstream os;
      os << "hns: advective Courant number " << courant << " > 1 at t = " << s.t;
      throw solver_abort(os.str());
    }
  }
}

}  // namespace gevflow::hns
