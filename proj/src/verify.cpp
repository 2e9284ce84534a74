#include <cmath>
#include <random>
#include <sstream>

#include "gevflow/harness.hpp"
#include "gevflow/hns.hpp"
#include "gevflow/paley.hpp"
#include "gevflow/prandtl.hpp"

namespace gevflow::harness {

using nlohmann::json;

bool VerifyReport::passed() const {
  for (const auto& p : properties)
    if (!p.passed) return false;
  return !properties.empty();
}

json VerifyReport::to_json() const {
  json props = json::array();
  for (const auto& p : properties)
    props.push_back({{"name", p.name},
                     {"passed", p.passed},
                     {"value", p.value},
                     {"threshold", p.threshold},
                     {"detail", p.detail}});
  return {{"passed", passed()}, {"version", version_string()}, {"properties", props}};
}

namespace {

Field random_band_field(const Grid& g, std::mt19937_64& rng, int m_max) {
  std::normal_distribution<double> n(0.0, 1.0);
  Field f(g);
  for (int j = 0; j < g.ny(); ++j) {
    f.at(0, j) = n(rng);
    for (int m = 1; m <= m_max; ++m) f.at(m, j) = cplx(n(rng), n(rng));
  }
  return f;
}

// max over rows of |u_j - A(t) sin(2 pi y_j)| / max |A(t) sin(2 pi y_j)| for
// the x-independent mode started from A(0) = 1, A'(0) = 0.
double linear_mode_error(bool use_hns, const Grid& g, double dt, double t_end) {
  Field u0(g);
  for (int j = 1; j < g.ny() - 1; ++j) u0.at(0, j) = std::sin(2.0 * kPi * g.y(j));
  const Field zero(g);
  const long steps = std::lround(t_end / dt);
  double t = 0.0;
  Field u(g);
  if (use_hns) {
    hns::Options o;
    o.nonlinear = false;
    hns::Solver solver(g, 0.5, o);
    hns::State s = hns::make_hns_data(u0, zero, 0.5);
    for (long i = 0; i < steps; ++i) s = solver.step(s, dt);
    t = s.t;
    u = s.u;
  } else {
    prandtl::Options o;
    o.nonlinear = false;
    prandtl::State s{u0, zero, 0.0};
    for (long i = 0; i < steps; ++i) s = prandtl::step(s, dt, o);
    t = s.t;
    u = s.u;
  }
  // Discrete eigenvalue of the 3-point y-Laplacian for sin(2 pi y).
  const double h = g.dy();
  const double mu = 4.0 * std::pow(std::sin(kPi * h), 2) / (h * h);
  const double w = std::sqrt(mu - 0.25);
  const double amp = std::exp(-0.5 * t) * (std::cos(w * t) + std::sin(w * t) / (2.0 * w));
  double err = 0.0, scale = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    const double exact = amp * std::sin(2.0 * kPi * g.y(j));
    err = std::max(err, std::abs(u.at(0, j) - exact));
    scale = std::max(scale, std::abs(exact));
  }
  return err / scale;
}

}  // namespace

VerifyReport cmd_verify(const VerifyOptions& opt) {
  VerifyReport rep;
  auto add = [&](std::string name, double value, double threshold, bool ok,
                 std::string detail = {}) {
    rep.properties.push_back({std::move(name), ok, value, threshold, std::move(detail)});
  };
  auto bound = [&](std::string name, double value, double threshold, std::string detail = {}) {
    add(std::move(name), value, threshold, value <= threshold, std::move(detail));
  };

  const Grid g(2.0 * kPi, opt.nx, opt.ny);
  paley::BankOptions bo;
  if (opt.inject == "partition-of-unity") {
    bo.phi_perturbation = 1e-6;
  } else if (!opt.inject.empty()) {
    throw std::invalid_argument("verify: unknown fault '" + opt.inject +
                                "' (known: partition-of-unity)");
  }
  const paley::DyadicBank bank(g, bo);
  std::mt19937_64 rng(opt.seed);
  const int band = g.dealias_max();

  bound("partition-of-unity", bank.partition_residual(), 1e-12);
  bound("low-frequency-identity", bank.low_frequency_residual(), 1e-12);
  {
    double overlap = 0.0;
    for (int j = bank.k_min(); j <= bank.k_max(); ++j)
      for (int k = j + 2; k <= bank.k_max(); ++k) {
        const auto pj = bank.phi_samples(j), pk = bank.phi_samples(k);
        for (int m = 1; m < g.modes(); ++m) overlap = std::max(overlap, std::abs(pj[m] * pk[m]));
      }
    bound("block-overlap", overlap, 1e-13);
    add("block-supports", bank.supports_ok() ? 0.0 : 1.0, 0.0, bank.supports_ok(),
        "phi_k vanishes outside 2^k [3/4, 8/3], chi outside [0, 4/3]");
  }
  {
    double worst = 0.0;
    bool ok = true;
    std::string detail;
    const Field f = random_band_field(g, rng, g.nx() / 2 - 1);
    for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
      const auto r = paley::bernstein_check(paley::delta_k(bank, f, k), k);
      if (r.skipped) continue;
      worst = std::max(worst, r.derivative_ratio);
      if (!r.within()) {
        ok = false;
        detail = "block " + std::to_string(k) + " ratio " + std::to_string(r.derivative_ratio);
      }
    }
    add("bernstein", worst, 8.0 / 3.0, ok, detail);
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Field f = random_band_field(g, rng, band);
      const Field h = random_band_field(g, rng, band);
      const auto parts = paley::bony(bank, f, h);
      Field sum = parts.T_fg;
      sum += parts.T_gf;
      sum += parts.R;
      const Field prod = product(f, h);
      worst = std::max(worst, l2_norm(sum - prod) / l2_norm(prod));
    }
    bound("bony-reconstruction", worst, 1e-10, "20 random band-limited pairs");
  }

  const gevrey::GevreyParams gp;
  {
    // theta' = delta^{1/2} e^{-kappa t / 2}, theta(0) = 0, by RK4.
    const double sd = std::sqrt(gp.delta()), k = gp.kappa();
    auto rate = [&](double t) { return sd * std::exp(-0.5 * k * t); };
    double th = 0.0, t = 0.0, worst = 0.0;
    const double h = 1e-2;
    for (int i = 0; i < 2000; ++i) {
      th += h / 6.0 * (rate(t) + 4.0 * rate(t + 0.5 * h) + rate(t + h));
      t = (i + 1) * h;
      worst = std::max(worst, std::abs(th - gp.theta(t)));
    }
    bound("gevrey-theta-ode", worst, 1e-10);
    double rad = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double s = 0.05 * i;
      rad = std::max(rad, std::abs(gp.radius(s) - 0.5 * gp.a * (1.0 + std::exp(-0.5 * k * s))));
    }
    bound("gevrey-radius-identity", rad, 1e-13);
  }
  {
    double worst = -INFINITY;
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 100; ++j) {
        const double xi = -50.0 + i * (100.0 / 99.0), eta = -50.0 + j * (100.0 / 99.0);
        const double gap = gp.phase(3.0, xi + eta) - gp.phase(3.0, xi) - gp.phase(3.0, eta);
        worst = std::max(worst, gap);
      }
    bound("phase-subadditivity", worst, 1e-14, "max of Phi(xi+eta) - Phi(xi) - Phi(eta)");
  }
  {
    const auto d = gevrey::make_gevrey_data(g, gp, 1.0, band, gevrey::Profile::Sin2Pi);
    const auto up = gevrey::apply_gevrey(d.u0, 2.0, gp, +1);
    const auto back = gevrey::apply_gevrey(up.field, 2.0, gp, -1);
    bound("gevrey-inverse-pair", l2_norm(back.field - d.u0) / l2_norm(d.u0), 1e-10);
  }
  for (bool use_hns : {false, true}) {
    const std::string name = use_hns ? "hns-linear-mode" : "prandtl-linear-mode";
    const double e1 = linear_mode_error(use_hns, g, 1e-3, 1.0);
    bound(name, e1, 1e-6, "t = 1, dt = 1e-3");
    const double ef = linear_mode_error(use_hns, g, 5e-4, 1.0);
    const double ratio = e1 / ef;
    add(name + "-dt-halving", ratio, 22.0, ratio >= 10.0 && ratio <= 22.0,
        "error ratio for dt = 1e-3 -> 5e-4, expected in [10, 22]");
  }
  return rep;
}

}  // namespace gevflow::harness
