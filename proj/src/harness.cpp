#include "gevflow/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "gevflow/hns.hpp"
#include "gevflow/paley.hpp"
#include "gevflow/prandtl.hpp"
#include "gevflow/simd.hpp"
#include "gevflow/snapshot.hpp"

#ifndef GEVFLOW_VERSION
#define GEVFLOW_VERSION "0.0.0"
#endif
#ifndef GEVFLOW_GIT_DESCRIBE
#define GEVFLOW_GIT_DESCRIBE "unknown"
#endif

namespace gevflow::harness {

using nlohmann::json;

std::string version_string() {
  return std::string("gevflow ") + GEVFLOW_VERSION + " (" + GEVFLOW_GIT_DESCRIBE + ")";
}

gevrey::GevreyData make_initial_data(const RunConfig& c, const Grid& g) {
  auto d = gevrey::make_gevrey_data(g, c.gevrey, c.data.amplitude, c.data.m_max,
                                    gevrey::parse_profile(c.data.profile));
  if (c.data.phase_seed != 0) {
    std::mt19937_64 rng(c.data.phase_seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (int m = 1; m <= c.data.m_max; ++m) {
      const cplx rot = std::polar(1.0, angle(rng));
      for (int j = 0; j < g.ny(); ++j) d.u0.at(m, j) *= rot;
    }
  }
  d.u1 = c.data.u1_scale * d.u0;
  return d;
}

Schedule make_schedule(double t_final, double dt_max, double explicit_dt,
                       int sample_every, double sample_interval) {
  if (!(t_final > 0.0) || !(dt_max > 0.0))
    throw std::invalid_argument("make_schedule: t_final and dt_max must be positive");
  Schedule s;
  if (sample_interval > 0.0) {
    const double cap = explicit_dt > 0.0 ? explicit_dt : dt_max;
    const long per = static_cast<long>(std::ceil(sample_interval / cap - 1e-9));
    const long intervals = static_cast<long>(std::ceil(t_final / sample_interval - 1e-9));
    s.dt = sample_interval / static_cast<double>(per);
    s.sample_every = per;
    s.steps = per * intervals;
  } else if (explicit_dt > 0.0) {
    s.dt = explicit_dt;
    s.steps = static_cast<long>(std::ceil(t_final / explicit_dt - 1e-9));
    s.sample_every = sample_every;
  } else {
    s.steps = static_cast<long>(std::ceil(t_final / dt_max - 1e-9));
    s.dt = t_final / static_cast<double>(s.steps);
    s.sample_every = sample_every;
  }
  return s;
}

double auto_dt(const RunConfig& c, const Grid& g, double eps) {
  double dt = c.solver.cfl * g.dy();
  if (eps > 0.0 && c.solver.eps_scaled_cfl) dt *= eps;
  return dt;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& file, const std::vector<std::string>& header) : os_(file) {
    if (!os_) throw std::runtime_error("cannot write " + file.string());
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
    width_ = header.size();
  }
  void row(const std::vector<double>& v) {
    if (v.size() != width_) throw std::logic_error("csv row width mismatch");
    std::string line;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) line += ',';
      line += fmt(v[i]);
    }
    os_ << line << '\n';
    os_.flush();
  }

 private:
  std::ofstream os_;
  std::size_t width_ = 0;
};

void write_json(const fs::path& file, const json& j) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << j.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string snapshot_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06d.bin", index);
  return buf;
}

std::vector<std::string> es_header() {
  std::vector<std::string> h = {"t", "step", "radius", "trust_horizon", "masked",
                                "L2.u", "L2.ut", "max_vertical_mean", "wall_max",
                                "E_s.weighted.u.B_s", "E_s.weighted.dyu.B_s",
                                "E_s.weighted.ut.B_s"};
  for (const auto& n : diagnostics::EsTracker::term_names()) h.push_back(n);
  h.push_back("E_s.composite_short");
  h.push_back("E_s.composite_full");
  return h;
}

void push_es(std::vector<double>& row, const diagnostics::EsSample& e) {
  row.push_back(e.u_Bs);
  row.push_back(e.dyu_Bs);
  row.push_back(e.ut_Bs);
  for (double v : e.terms) row.push_back(v);
  row.push_back(e.composite_short);
  row.push_back(e.composite_full);
}

std::optional<diagnostics::DecayFit> fit_l2(const std::vector<std::pair<double, double>>& s,
                                            double t0, double t1) {
  try {
    return diagnostics::decay_fit(s, t0, t1);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

json decay_json(const std::optional<diagnostics::DecayFit>& f) {
  if (!f) return nullptr;
  json j = {{"rate", f->rate}, {"intercept", f->intercept}, {"r2", f->r2},
            {"used", f->used}, {"trimmed", f->trimmed}};
  if (!f->warning.empty()) j["warning"] = f->warning;
  return j;
}

struct RunLog {
  fs::path dir;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  json extra = json::object();
};

void write_metadata(const RunLog& log, const RunConfig& c, const RunResult& r) {
  json j = {{"version", version_string()},
            {"simd_backend", std::string(simd::backend_name(simd::backend()))},
            {"config", config_to_json(c)},
            {"status", r.ok ? "ok" : "aborted"},
            {"abort_reason", r.ok ? json(nullptr) : json(r.abort_reason)},
            {"wall_seconds", r.wall_seconds},
            {"dt", r.dt},
            {"steps", r.steps},
            {"samples", r.samples},
            {"decay_fit_L2_u", decay_json(r.decay)}};
  for (const auto& [k, v] : log.extra.items()) j[k] = v;
  write_json(log.dir / "metadata.json", j);
}

fs::path prepare_dir(const RunConfig& c) {
  const fs::path dir = resolve_output(c.output.directory);
  fs::create_directories(dir / "snapshots");
  write_json(dir / "config.json", config_to_json(c));
  return dir;
}

RunResult run_prandtl(const RunConfig& c, RunLog& log) {
  const Grid g = c.make_grid();
  const auto data = make_initial_data(c, g);
  const paley::DyadicBank bank(g);
  const Schedule sch = make_schedule(c.solver.t_final, auto_dt(c, g, 0.0), c.solver.dt,
                                     c.output.sample_every, c.output.sample_interval);
  prandtl::Options po;
  po.law = c.law();
  po.quadratic_factor = c.solver.pressure_factor;
  po.nonlinear = c.solver.nonlinear;
  po.check_every = c.solver.n_check;
  prandtl::Integrator it(po);
  prandtl::State s{data.u0, data.u1, 0.0};
  diagnostics::EsTracker es(bank, c.experiment.s, c.gevrey);

  RunResult r;
  r.dir = log.dir;
  r.dt = sch.dt;
  Csv csv(log.dir / "series.csv", es_header());
  std::vector<std::pair<double, double>> l2;
  int snaps = 0;
  auto snapshot = [&](const std::string& name) {
    write_snapshot(log.dir / "snapshots" / name,
                   Snapshot{Snapshot::Kind::Prandtl, s.t, 0.0, {s.u, s.ut}});
  };
  auto sample = [&](long step) {
    const auto& e = es.add(s.u, s.ut, s.t);
    const double nu = l2_norm(s.u);
    l2.emplace_back(s.t, nu);
    std::vector<double> row = {s.t,
                               static_cast<double>(step),
                               e.radius,
                               e.trust_horizon,
                               static_cast<double>(e.masked),
                               nu,
                               l2_norm(s.ut),
                               prandtl::max_vertical_mean(s.u),
                               prandtl::wall_residual(s)};
    push_es(row, e);
    csv.row(row);
    ++r.samples;
    if (c.output.snapshot_every > 0 && (r.samples - 1) % c.output.snapshot_every == 0)
      snapshot(snapshot_name(snaps++));
  };

  try {
    sample(0);
    for (long step = 1; step <= sch.steps; ++step) {
      it.advance(s, sch.dt);
      r.steps = step;
      if (step % sch.sample_every == 0 || step == sch.steps) sample(step);
    }
  } catch (const solver_abort& e) {
    r.ok = false;
    r.abort_reason = e.what();
  } catch (const gevrey::gevrey_overflow& e) {
    r.ok = false;
    r.abort_reason = e.what();
  }
  snapshot("final.bin");
  log.extra["worst_vertical_mean"] = it.worst_mean();
  if (!l2.empty()) r.decay = fit_l2(l2, 0.0, l2.back().first);
  return r;
}

RunResult run_hns(const RunConfig& c, RunLog& log) {
  const Grid g = c.make_grid();
  const double eps = c.experiment.eps;
  const auto data = make_initial_data(c, g);
  const paley::DyadicBank bank(g);
  const Schedule sch = make_schedule(c.solver.t_final, auto_dt(c, g, eps), c.solver.dt,
                                     c.output.sample_every, c.output.sample_interval);
  hns::Options ho;
  ho.nonlinear = c.solver.nonlinear;
  ho.n_proj = c.solver.n_proj;
  ho.n_check = c.solver.n_check;
  ho.hydrostatic = c.experiment.hydrostatic_test;
  hns::Integrator it(g, eps, ho);
  hns::State s = hns::make_hns_data(data.u0, data.u1, eps);
  diagnostics::EsTracker es(bank, c.experiment.s, c.gevrey);
  diagnostics::E1Tracker e1(bank, eps, c.gevrey);

  auto header = es_header();
  header.insert(header.begin() + 7, "L2.v");
  for (const auto& n : diagnostics::E1Tracker::term_names()) header.push_back(n);
  header.push_back("E1.composite");
  header.push_back("div.state");
  header.push_back("div.stage_max");

  RunResult r;
  r.dir = log.dir;
  r.dt = sch.dt;
  Csv csv(log.dir / "series.csv", header);
  std::vector<std::pair<double, double>> l2;
  double worst_state_div = 0.0, worst_stage_div = 0.0;
  int snaps = 0;
  auto snapshot = [&](const std::string& name) {
    write_snapshot(log.dir / "snapshots" / name,
                   Snapshot{Snapshot::Kind::Hns, s.t, eps, {s.u, s.v, s.ut, s.vt}});
  };
  auto sample = [&](long step) {
    const auto& e = es.add(s.u, s.ut, s.t);
    const auto& f = e1.add(s.u, s.v, s.ut, s.vt, s.t);
    const double nu = l2_norm(s.u);
    const double div = hns::divergence_ratio(s.u, s.v);
    const double stage = it.solver().max_stage_divergence();
    it.solver().reset_stats();
    worst_state_div = std::max(worst_state_div, div);
    worst_stage_div = std::max(worst_stage_div, stage);
    l2.emplace_back(s.t, nu);
    std::vector<double> row = {s.t,
                               static_cast<double>(step),
                               e.radius,
                               e.trust_horizon,
                               static_cast<double>(e.masked),
                               nu,
                               l2_norm(s.ut),
                               l2_norm(s.v),
                               prandtl::max_vertical_mean(s.u),
                               hns::max_wall(s)};
    push_es(row, e);
    for (double v : f.terms) row.push_back(v);
    row.push_back(f.composite);
    row.push_back(div);
    row.push_back(stage);
    csv.row(row);
    ++r.samples;
    if (c.output.snapshot_every > 0 && (r.samples - 1) % c.output.snapshot_every == 0)
      snapshot(snapshot_name(snaps++));
  };

  try {
    sample(0);
    for (long step = 1; step <= sch.steps; ++step) {
      it.advance(s, sch.dt);
      r.steps = step;
      if (step % sch.sample_every == 0 || step == sch.steps) sample(step);
    }
  } catch (const solver_abort& e) {
    r.ok = false;
    r.abort_reason = e.what();
  } catch (const gevrey::gevrey_overflow& e) {
    r.ok = false;
    r.abort_reason = e.what();
  }
  snapshot("final.bin");
  log.extra["eps"] = eps;
  log.extra["worst_state_divergence"] = worst_state_div;
  log.extra["worst_stage_divergence"] = worst_stage_div;
  log.extra["last_cleanup_correction"] = it.last_correction();
  if (!l2.empty()) r.decay = fit_l2(l2, 0.0, l2.back().first);
  return r;
}

}  // namespace

RunResult cmd_run(const RunConfig& c) {
  c.validate();
  if (c.experiment.kind == ExperimentKind::Sweep)
    throw std::invalid_argument("cmd_run: experiment.kind 'sweep' needs the sweep command");
  RunLog log;
  log.dir = prepare_dir(c);
  RunResult r;
  try {
    r = c.experiment.kind == ExperimentKind::Prandtl ? run_prandtl(c, log) : run_hns(c, log);
  } catch (const std::exception& e) {
    r.dir = log.dir;
    r.ok = false;
    r.abort_reason = e.what();
  }
  r.wall_seconds = seconds_since(log.t0);
  write_metadata(log, c, r);
  return r;
}

SweepResult cmd_sweep(const RunConfig& c) {
  c.validate();
  if (c.experiment.kind != ExperimentKind::Sweep)
    throw std::invalid_argument("cmd_sweep: experiment.kind must be 'sweep'");
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = resolve_output(c.output.directory);
  fs::create_directories(dir);
  write_json(dir / "config.json", config_to_json(c));

  const Grid g = c.make_grid();
  const auto data = make_initial_data(c, g);
  const paley::DyadicBank bank(g);

  // Common sample times: every member step divides the sample interval.
  double interval = c.output.sample_interval;
  if (interval <= 0.0) {
    const Schedule ref = make_schedule(c.solver.t_final, auto_dt(c, g, 0.0), c.solver.dt,
                                       c.output.sample_every, 0.0);
    interval = ref.dt * static_cast<double>(c.output.sample_every);
  }

  json meta = {{"version", version_string()},
               {"simd_backend", std::string(simd::backend_name(simd::backend()))},
               {"config", config_to_json(c)},
               {"sample_interval", interval}};
  auto fail = [&](const std::string& why, double eps) {
    meta["status"] = "failed";
    meta["abort_reason"] = why;
    meta["failed_member_eps"] = eps;
    meta["wall_seconds"] = seconds_since(t0);
    write_json(dir / "metadata.json", meta);
    throw sweep_failure(why, eps);
  };

  // Prandtl reference.
  std::vector<Field> ref_u, ref_ut;
  std::vector<double> times;
  {
    const Schedule sch = make_schedule(c.solver.t_final, auto_dt(c, g, 0.0), c.solver.dt,
                                       c.output.sample_every, interval);
    prandtl::Options po;
    po.law = c.law();
    po.quadratic_factor = c.solver.pressure_factor;
    po.nonlinear = c.solver.nonlinear;
    po.check_every = c.solver.n_check;
    prandtl::Integrator it(po);
    prandtl::State s{data.u0, data.u1, 0.0};
    ref_u.push_back(s.u);
    ref_ut.push_back(s.ut);
    times.push_back(0.0);
    try {
      for (long step = 1; step <= sch.steps; ++step) {
        it.advance(s, sch.dt);
        if (step % sch.sample_every == 0) {
          ref_u.push_back(s.u);
          ref_ut.push_back(s.ut);
          times.push_back(s.t);
        }
      }
    } catch (const solver_abort& e) {
      fail(std::string("Prandtl reference aborted: ") + e.what(), 0.0);
    }
    meta["reference"] = {{"dt", sch.dt}, {"steps", sch.steps},
                         {"worst_vertical_mean", it.worst_mean()}};
  }

  SweepResult out;
  out.dir = dir;
  std::vector<std::vector<double>> err_series;
  for (double eps : c.experiment.eps_list) {
    const Schedule sch = make_schedule(c.solver.t_final, auto_dt(c, g, eps), c.solver.dt,
                                       c.output.sample_every, interval);
    hns::Options ho;
    ho.nonlinear = c.solver.nonlinear;
    ho.n_proj = c.solver.n_proj;
    ho.n_check = c.solver.n_check;
    ho.hydrostatic = c.experiment.hydrostatic_test;
    ho.track_stage_divergence = false;
    hns::Integrator it(g, eps, ho);
    hns::State s = hns::make_hns_data(data.u0, data.u1, eps);
    diagnostics::E1Tracker e1(bank, eps, c.gevrey, 0.0);
    SweepMember m;
    m.eps = eps;
    m.dt = sch.dt;
    m.steps = sch.steps;
    std::vector<double> errs;
    std::size_t k = 0;
    auto measure = [&]() {
      if (k >= times.size()) return;
      const Field w1 = s.u - ref_u[k];
      const Field w2 = s.v - prandtl::recover_v(ref_u[k]);
      const Field w1t = s.ut - ref_ut[k];
      const Field w2t = s.vt - prandtl::recover_v(ref_ut[k]);
      const double e = l2_norm(w1);
      errs.push_back(e);
      m.sup_l2_error = std::max(m.sup_l2_error, e);
      m.final_l2_error = e;
      m.sup_e1_error = std::max(m.sup_e1_error, e1.add(w1, w2, w1t, w2t, times[k]).composite);
      ++k;
    };
    measure();
    try {
      for (long step = 1; step <= sch.steps; ++step) {
        it.advance(s, sch.dt);
        if (step % sch.sample_every == 0) measure();
      }
    } catch (const solver_abort& e) {
      std::ostringstream os;
      os << "sweep member eps = " << eps << " aborted: " << e.what();
      fail(os.str(), eps);
    } catch (const gevrey::gevrey_overflow& e) {
      std::ostringstream os;
      os << "sweep member eps = " << eps << " overflowed: " << e.what();
      fail(os.str(), eps);
    }
    if (k != times.size()) fail("sweep member sample times do not match the reference", eps);
    out.members.push_back(m);
    err_series.push_back(std::move(errs));
  }

  out.strictly_decreasing = true;
  for (std::size_t i = 1; i < out.members.size(); ++i)
    if (!(out.members[i].sup_l2_error < out.members[i - 1].sup_l2_error))
      out.strictly_decreasing = false;

  out.fit_skipped = c.experiment.hydrostatic_test;
  for (const auto& m : out.members)
    if (!(m.sup_l2_error > 0.0)) out.fit_skipped = true;
  if (!out.fit_skipped) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& m : out.members) pts.emplace_back(std::log(m.eps), m.sup_l2_error);
    const auto fit = diagnostics::decay_fit(pts, -INFINITY, INFINITY);
    out.slope = fit.rate;
    out.intercept = fit.intercept;
  }

  {
    Csv csv(dir / "sweep.csv", {"eps", "sup_l2_error", "final_l2_error",
                                "sup_E1_0_error", "dt", "steps"});
    for (const auto& m : out.members)
      csv.row({m.eps, m.sup_l2_error, m.final_l2_error, m.sup_e1_error, m.dt,
               static_cast<double>(m.steps)});
  }
  {
    std::vector<std::string> h = {"t"};
    for (const auto& m : out.members) h.push_back("l2_error.eps=" + fmt(m.eps));
    Csv csv(dir / "errors.csv", h);
    for (std::size_t k = 0; k < times.size(); ++k) {
      std::vector<double> row = {times[k]};
      for (const auto& e : err_series) row.push_back(e[k]);
      csv.row(row);
    }
  }
  json fit = {{"fit_skipped", out.fit_skipped},
              {"slope", out.fit_skipped ? json(nullptr) : json(out.slope)},
              {"intercept", out.fit_skipped ? json(nullptr) : json(out.intercept)},
              {"strictly_decreasing", out.strictly_decreasing}};
  write_json(dir / "fit.json", fit);
  meta["status"] = "ok";
  meta["fit"] = fit;
  meta["wall_seconds"] = seconds_since(t0);
  write_json(dir / "metadata.json", meta);
  return out;
}

}  // namespace gevflow::harness
