// One line per acceptance criterion; exit status 1 if any fails.

#include <malloc.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "gevflow/harness.hpp"
#include "gevflow/hns.hpp"
#include "gevflow/paley.hpp"
#include "gevflow/prandtl.hpp"
#include "hns_oracle.hpp"
#include "test_util.hpp"

using namespace gevflow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<double> column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) {
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(r[i]);
        return out;
      }
    throw std::runtime_error("missing column " + name);
  }
};

Table read_csv(const fs::path& f) {
  std::ifstream in(f);
  if (!in) throw std::runtime_error("cannot read " + f.string());
  Table t;
  std::string line, cell;
  std::getline(in, line);
  std::stringstream hs(line);
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::vector<double> r;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    t.rows.push_back(r);
  }
  return t;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double vmax(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

RunConfig shipped(const std::string& name, const std::string& out) {
  RunConfig c = load_config(fs::path(GEVFLOW_CONFIG_DIR) / (name + ".json"));
  c.output.directory = (fs::path("acceptance_runs") / out).string();
  fs::remove_all(resolve_output(c.output.directory));
  return c;
}

Field random_band(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Field f(g);
  for (int j = 0; j < g.ny(); ++j) {
    f.at(0, j) = n(rng);
    for (int m = 1; m <= g.dealias_max(); ++m) f.at(m, j) = cplx(n(rng), n(rng));
  }
  return f;
}

Outcome dyadic() {
  double pu = 0.0, lf = 0.0, ov = 0.0;
  for (int nx : {64, 128, 256, 512}) {
    const paley::DyadicBank bank(Grid(2.0 * kPi, nx, 9));
    pu = std::max(pu, bank.partition_residual());
    lf = std::max(lf, bank.low_frequency_residual());
    for (int j = bank.k_min(); j <= bank.k_max(); ++j)
      for (int k = j + 2; k <= bank.k_max(); ++k)
        for (int m = 0; m <= nx / 2; ++m)
          ov = std::max(ov, std::abs(bank.phi_samples(j)[m] * bank.phi_samples(k)[m]));
  }
  return {pu <= 1e-12 && lf <= 1e-12 && ov <= 1e-13,
          "partition " + num(pu) + ", low-frequency " + num(lf) + ", overlap " + num(ov)};
}

Outcome bony() {
  const Grid g(2.0 * kPi, 128, 33);
  const paley::DyadicBank bank(g);
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Field f = random_band(g, rng), h = random_band(g, rng);
    const auto p = paley::bony(bank, f, h);
    const Field fh = product(f, h);
    worst = std::max(worst, l2_norm(p.T_fg + p.T_gf + p.R - fh) / l2_norm(fh));
  }
  return {worst <= 1e-10, "worst relative error " + num(worst) + " over 20 pairs"};
}

Outcome gevrey_checks() {
  const gevrey::GevreyParams p;
  const double sd = std::sqrt(p.delta()), k = p.kappa();
  // theta' = sd e^{-k t/2}, theta(0) = 0, integrated by RK4.
  double th = 0.0, ode = 0.0;
  const double h = 1e-3;
  auto f = [&](double t) { return sd * std::exp(-0.5 * k * t); };
  for (int i = 0; i < 20000; ++i) {
    const double t = i * h;
    th += h / 6.0 * (f(t) + 4.0 * f(t + 0.5 * h) + f(t + h));
    ode = std::max(ode, std::abs(th - p.theta(t + h)));
  }
  double rad = 0.0;
  for (double t = 0.0; t <= 100.0; t += 0.01)
    rad = std::max(rad, std::abs(p.a - p.lambda * p.theta(t) - 0.5 * p.a * (1 + std::exp(-0.5 * k * t))));
  double sub = -INFINITY;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const double xi = -64.0 + i * 128.0 / 99.0, eta = -64.0 + j * 128.0 / 99.0;
      for (double t : {0.0, 5.0})
        sub = std::max(sub, p.phase(t, xi + eta) - p.phase(t, xi) - p.phase(t, eta));
    }
  const Grid g(2.0 * kPi, 128, 33);
  std::mt19937_64 rng(3);
  const Field u = random_band(g, rng);
  const auto up = gevrey::apply_gevrey(u, 2.0, p, +1);
  const auto back = gevrey::apply_gevrey(up.field, 2.0, p, -1);
  const double inv = l2_norm(back.field - u) / l2_norm(u);
  return {ode <= 1e-10 && rad <= 1e-13 && sub <= 1e-14 && inv <= 1e-10,
          "theta-ODE " + num(ode) + ", radius " + num(rad) + ", subadditivity gap " + num(sub) +
              ", inverse pair " + num(inv)};
}

// Relative error at t = 1 of one linear mode; `hns_eps` = 0 selects Prandtl.
double linear_error(double hns_eps, int m, double dt) {
  const Grid g(2.0 * kPi, 16, 33);
  Field u0(g);
  for (int j = 1; j < g.ny() - 1; ++j) u0.at(m, j) = std::sin(2 * kPi * g.y(j));
  const long n = std::lround(1.0 / dt);
  Field u(g), v(g), ut(g), vt(g);
  if (hns_eps > 0.0) {
    hns::Options o;
    o.nonlinear = false;
    o.n_proj = 0;
    hns::Solver solver(g, hns_eps, o);
    hns::State s = hns::make_hns_data(u0, Field(g), hns_eps);
    for (long i = 0; i < n; ++i) s = solver.step(s, dt);
    u = s.u, v = s.v, ut = s.ut, vt = s.vt;
  } else {
    prandtl::Options o;
    o.nonlinear = false;
    prandtl::State s{u0, Field(g), 0.0};
    for (long i = 0; i < n; ++i) s = prandtl::step(s, dt, o);
    u = s.u;
  }
  if (m == 0 || hns_eps == 0.0) {
    // sin(2 pi y) is an eigenvector of the 3-point Laplacian, eigenvalue mu_h;
    // the pressure vanishes on it.
    const double h = g.dy();
    const double mu = 4.0 * std::pow(std::sin(kPi * h), 2) / (h * h);
    const double w = std::sqrt(mu - 0.25);
    const double a = std::exp(-0.5) * (std::cos(w) + std::sin(w) / (2 * w));
    double err = 0.0;
    for (int j = 0; j < g.ny(); ++j) err = std::max(err, std::abs(u.at(m, j) - a * u0.at(m, j)));
    return err / std::abs(a);
  }
  const auto y = testing::linear_flow(g, m, hns_eps, u0, prandtl::recover_v(u0), 1.0);
  testing::CVec got(y.size());
  got << testing::pack(u, v, m), testing::pack(ut, vt, m);
  return (got - y).norm() / y.norm();
}

Outcome linear_modes() {
  struct Case {
    const char* name;
    double eps;
    int m;
  };
  const Case cases[] = {{"prandtl xi=0", 0.0, 0}, {"prandtl xi=3", 0.0, 3},
                        {"hns eps=0.5 xi=0", 0.5, 0}, {"hns eps=0.5 xi=1", 0.5, 1}};
  bool ok = true;
  std::string d;
  for (const auto& c : cases) {
    const double e1 = linear_error(c.eps, c.m, 1e-3), e2 = linear_error(c.eps, c.m, 5e-4);
    const double r = e1 / e2;
    ok = ok && e1 <= 1e-6 && r >= 10.0 && r <= 22.0;
    d += std::string(d.empty() ? "" : "; ") + c.name + ": err " + num(e1) + ", ratio " + num(r);
  }
  return {ok, d};
}

Outcome conservation() {
  RunConfig c;
  const Grid g = c.make_grid();
  const auto data = harness::make_initial_data(c, g);
  prandtl::Options o;
  o.check_every = 1;
  prandtl::Integrator it(o);
  prandtl::State s{data.u0, data.u1, 0.0};
  const double dt = harness::auto_dt(c, g, 0.0);
  const long n = std::lround(10.0 / dt);
  double walls = 0.0;
  for (long i = 0; i < n; ++i) {
    it.advance(s, dt);
    walls = std::max(walls, prandtl::wall_residual(s));
  }
  return {it.worst_mean() <= 1e-10 && walls == 0.0,
          "max_x |int u dy| " + num(it.worst_mean()) + " over " + std::to_string(n) +
              " steps to t = " + num(s.t) + ", wall max " + num(walls)};
}

struct DecayRuns {
  harness::RunResult prandtl, hns;
};

DecayRuns& decay_runs() {
  static DecayRuns r = [] {
    DecayRuns d;
    d.prandtl = harness::cmd_run(shipped("prandtl_decay", "prandtl_decay"));
    d.hns = harness::cmd_run(shipped("hns_decay", "hns_decay"));
    return d;
  }();
  return r;
}

Outcome hns_constraint() {
  const auto& r = decay_runs().hns;
  if (!r.ok) return {false, "run aborted: " + r.abort_reason};
  const Table t = read_csv(r.dir / "series.csv");
  const double stage = vmax(t.column("div.stage_max"));
  const double state = vmax(t.column("div.state"));
  return {stage <= 1e-8 && state <= 1e-6,
          "eps = 0.1, " + std::to_string(t.rows.size()) + " outputs: stage " + num(stage) +
              ", state " + num(state)};
}

Outcome decay() {
  bool ok = true;
  std::string d;
  for (const auto* r : {&decay_runs().prandtl, &decay_runs().hns}) {
    const std::string name = r == &decay_runs().prandtl ? "prandtl" : "hns";
    if (!r->ok) return {false, name + " aborted: " + r->abort_reason};
    const Table t = read_csv(r->dir / "series.csv");
    const auto w = t.column("E_s.weighted.u.B_s");
    const double ratio = vmax(w) / w.front();
    const double rate = r->decay ? r->decay->rate : NAN;
    ok = ok && rate <= -0.4 && ratio <= 10.0 && t.column("t").back() >= 20.0 - 1e-9;
    d += std::string(d.empty() ? "" : "; ") + name + ": rate " + num(rate) + ", weighted ratio " +
         num(ratio);
  }
  return {ok, d};
}

Outcome sweep() {
  const auto r = harness::cmd_sweep(shipped("sweep", "sweep"));
  std::string d;
  for (const auto& m : r.members) d += "eps " + num(m.eps) + ": " + num(m.sup_l2_error) + "; ";
  return {r.strictly_decreasing && r.slope >= 0.9, d + "slope " + num(r.slope)};
}

Outcome determinism() {
  bool ok = true;
  std::string d;
  for (const char* kind : {"prandtl", "hns"}) {
    RunConfig c = shipped(std::string(kind) + "_decay", std::string("det_") + kind + "_a");
    c.solver.t_final = 1.0;
    const auto a = harness::cmd_run(c);
    c.output.directory = (fs::path("acceptance_runs") / (std::string("det_") + kind + "_b")).string();
    fs::remove_all(resolve_output(c.output.directory));
    const auto b = harness::cmd_run(c);
    const bool same = a.ok && b.ok && slurp(a.dir / "series.csv") == slurp(b.dir / "series.csv") &&
                      slurp(a.dir / "snapshots/final.bin") == slurp(b.dir / "snapshots/final.bin");
    ok = ok && same;
    d += std::string(d.empty() ? "" : "; ") + kind + (same ? " identical" : " differs");
  }
  return {ok, d};
}

}  // namespace

int main() {
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"dyadic-identities", dyadic},
      {"bony-reconstruction", bony},
      {"gevrey-machinery", gevrey_checks},
      {"linear-mode-oracle", linear_modes},
      {"prandtl-conservation", conservation},
      {"hns-constraint", hns_constraint},
      {"decay", decay},
      {"hydrostatic-convergence", sweep},
      {"determinism", determinism},
  };
  int failed = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), sec);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed ? 1 : 0;
}
