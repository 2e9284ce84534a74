#include "gevflow/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

namespace gevflow {

using nlohmann::json;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Prandtl: return "prandtl";
    case ExperimentKind::Hns: return "hns";
    case ExperimentKind::Sweep: return "sweep";
  }
  return "?";
}

namespace {

ExperimentKind parse_kind(const std::string& s) {
  if (s == "prandtl") return ExperimentKind::Prandtl;
  if (s == "hns") return ExperimentKind::Hns;
  if (s == "sweep") return ExperimentKind::Sweep;
  throw std::invalid_argument("experiment.kind: unknown value '" + s +
                              "' (expected prandtl, hns, sweep)");
}

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw std::invalid_argument("config: " + field + " " + why);
}

// Reads the keys of `obj` into the given slots; unknown keys are errors so
// that typos do not silently fall back to defaults.
class Reader {
 public:
  Reader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) bad(prefix_, "must be an object");
  }
  template <class T>
  void get(const char* key, T& slot) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      slot = obj_.at(key).get<T>();
    } catch (const json::exception& e) {
      bad(prefix_ + "." + key, std::string("has the wrong type: ") + e.what());
    }
  }
  const json* sub(const char* key) {
    seen_.insert(key);
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }
  void finish() const {
    for (const auto& [k, v] : obj_.items())
      if (!seen_.count(k)) bad(prefix_.empty() ? k : prefix_ + "." + k, "is not a known field");
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

}  // namespace

void RunConfig::validate() const {
  if (!(grid.lx > 0.0) || !std::isfinite(grid.lx)) bad("grid.lx", "must be > 0");
  if (grid.nx < 8 || grid.nx % 2 != 0) bad("grid.nx", "must be even and >= 8");
  if (grid.ny < 9) bad("grid.ny", "must be >= 9");
  try {
    gevrey.validate();
  } catch (const std::invalid_argument& e) {
    bad("gevrey", e.what());
  }
  if (!std::isfinite(data.amplitude) || data.amplitude < 0.0)
    bad("data.amplitude", "must be finite and >= 0");
  if (data.m_max < 1 || data.m_max > (grid.nx - 1) / 3)
    bad("data.m_max", "must lie in [1, (nx - 1)/3] = [1, " +
                          std::to_string((grid.nx - 1) / 3) + "]");
  try {
    gevrey::parse_profile(data.profile);
  } catch (const std::invalid_argument& e) {
    bad("data.profile", e.what());
  }
  if (!std::isfinite(data.u1_scale)) bad("data.u1_scale", "must be finite");
  if (!(solver.dt >= 0.0) || !std::isfinite(solver.dt)) bad("solver.dt", "must be >= 0");
  if (!(solver.cfl > 0.0) || solver.cfl > 1.0) bad("solver.cfl", "must lie in (0, 1]");
  if (!(solver.t_final > 0.0) || !std::isfinite(solver.t_final))
    bad("solver.t_final", "must be > 0");
  if (solver.n_proj < 0) bad("solver.n_proj", "must be >= 0");
  if (solver.n_check < 0) bad("solver.n_check", "must be >= 0");
  if (!(solver.pressure_factor > 0.0)) bad("solver.pressure_factor", "must be > 0");
  if (solver.pressure_law != "compatible" && solver.pressure_law != "formula")
    bad("solver.pressure_law", "must be 'compatible' or 'formula'");
  if (!(experiment.eps > 0.0) || experiment.eps > 1.0)
    bad("experiment.eps", "must lie in (0, 1]");
  if (!std::isfinite(experiment.s)) bad("experiment.s", "must be finite");
  if (experiment.kind == ExperimentKind::Sweep) {
    const auto& e = experiment.eps_list;
    if (e.size() < 3) bad("experiment.eps_list", "needs at least 3 values for a sweep");
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!(e[i] > 0.0) || e[i] > 1.0) bad("experiment.eps_list", "values must lie in (0, 1]");
      if (i > 0 && !(e[i] < e[i - 1])) bad("experiment.eps_list", "must be strictly decreasing");
    }
  }
  if (output.directory.empty()) bad("output.directory", "must not be empty");
  if (output.sample_every < 1) bad("output.sample_every", "must be >= 1");
  if (!(output.sample_interval >= 0.0)) bad("output.sample_interval", "must be >= 0");
  if (output.snapshot_every < 0) bad("output.snapshot_every", "must be >= 0");
}

Grid RunConfig::make_grid() const { return Grid(grid.lx, grid.nx, grid.ny); }

prandtl::PressureLaw RunConfig::law() const {
  return solver.pressure_law == "formula" ? prandtl::PressureLaw::Formula
                                          : prandtl::PressureLaw::Compatible;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Reader top(j, "");
  if (const json* g = top.sub("grid")) {
    Reader r(*g, "grid");
    r.get("lx", c.grid.lx);
    r.get("nx", c.grid.nx);
    r.get("ny", c.grid.ny);
    r.finish();
  }
  if (const json* g = top.sub("gevrey")) {
    Reader r(*g, "gevrey");
    r.get("a", c.gevrey.a);
    r.get("lambda", c.gevrey.lambda);
    r.get("poincare", c.gevrey.poincare);
    r.finish();
  }
  if (const json* g = top.sub("data")) {
    Reader r(*g, "data");
    r.get("amplitude", c.data.amplitude);
    r.get("m_max", c.data.m_max);
    r.get("profile", c.data.profile);
    r.get("u1_scale", c.data.u1_scale);
    r.get("phase_seed", c.data.phase_seed);
    r.finish();
  }
  if (const json* g = top.sub("solver")) {
    Reader r(*g, "solver");
    r.get("dt", c.solver.dt);
    r.get("cfl", c.solver.cfl);
    r.get("eps_scaled_cfl", c.solver.eps_scaled_cfl);
    r.get("t_final", c.solver.t_final);
    r.get("n_proj", c.solver.n_proj);
    r.get("n_check", c.solver.n_check);
    r.get("pressure_factor", c.solver.pressure_factor);
    r.get("pressure_law", c.solver.pressure_law);
    r.get("nonlinear", c.solver.nonlinear);
    r.finish();
  }
  if (const json* g = top.sub("experiment")) {
    Reader r(*g, "experiment");
    std::string kind = to_string(c.experiment.kind);
    r.get("kind", kind);
    c.experiment.kind = parse_kind(kind);
    r.get("eps", c.experiment.eps);
    r.get("eps_list", c.experiment.eps_list);
    r.get("s", c.experiment.s);
    r.get("hydrostatic_test", c.experiment.hydrostatic_test);
    r.finish();
  }
  if (const json* g = top.sub("output")) {
    Reader r(*g, "output");
    r.get("directory", c.output.directory);
    r.get("sample_every", c.output.sample_every);
    r.get("sample_interval", c.output.sample_interval);
    r.get("snapshot_every", c.output.snapshot_every);
    r.finish();
  }
  top.finish();
  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  return {
      {"grid", {{"lx", c.grid.lx}, {"nx", c.grid.nx}, {"ny", c.grid.ny}}},
      {"gevrey",
       {{"a", c.gevrey.a}, {"lambda", c.gevrey.lambda}, {"poincare", c.gevrey.poincare}}},
      {"data",
       {{"amplitude", c.data.amplitude},
        {"m_max", c.data.m_max},
        {"profile", c.data.profile},
        {"u1_scale", c.data.u1_scale},
        {"phase_seed", c.data.phase_seed}}},
      {"solver",
       {{"dt", c.solver.dt},
        {"cfl", c.solver.cfl},
        {"eps_scaled_cfl", c.solver.eps_scaled_cfl},
        {"t_final", c.solver.t_final},
        {"n_proj", c.solver.n_proj},
        {"n_check", c.solver.n_check},
        {"pressure_factor", c.solver.pressure_factor},
        {"pressure_law", c.solver.pressure_law},
        {"nonlinear", c.solver.nonlinear}}},
      {"experiment",
       {{"kind", to_string(c.experiment.kind)},
        {"eps", c.experiment.eps},
        {"eps_list", c.experiment.eps_list},
        {"s", c.experiment.s},
        {"hydrostatic_test", c.experiment.hydrostatic_test}}},
      {"output",
       {{"directory", c.output.directory},
        {"sample_every", c.output.sample_every},
        {"sample_interval", c.output.sample_interval},
        {"snapshot_every", c.output.snapshot_every}}},
  };
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config file " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + file.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_schema() {
  const RunConfig d;
  auto field = [](const char* type, json def, const char* text) {
    return json{{"type", type}, {"default", std::move(def)}, {"description", text}};
  };
  auto group = [](const char* text, json props) {
    return json{{"type", "object"},
                {"description", text},
                {"additionalProperties", false},
                {"properties", std::move(props)}};
  };
  json s = group(
      "Run configuration. Every field is optional.",
      {
          {"grid", group("Periodic x by wall-bounded y grid.",
                         {{"lx", field("number", d.grid.lx, "Period in x, > 0.")},
                          {"nx", field("integer", d.grid.nx, "x points, even, >= 8.")},
                          {"ny", field("integer", d.grid.ny,
                                       "y nodes including both walls, >= 9.")}})},
          {"gevrey",
           group("Gevrey-2 weight parameters.",
                 {{"a", field("number", d.gevrey.a, "Initial radius, > 0.")},
                  {"lambda", field("number", d.gevrey.lambda,
                                   "Radius-loss multiplier, >= 1. Only rescales diagnostics.")},
                  {"poincare", field("number", d.gevrey.poincare,
                                     "Poincare constant (sharp value 1/pi^2).")}})},
          {"data",
           group("Initial data u0 = c e^{-a|xi|^{1/2}} P(y) on 1 <= |m| <= m_max.",
                 {{"amplitude", field("number", d.data.amplitude, "c, >= 0.")},
                  {"m_max", field("integer", d.data.m_max, "Band limit, <= (nx-1)/3.")},
                  {"profile", field("string", d.data.profile,
                                    "Vertical profile: sin2pi, sin4pi, sinpi_sin2pi.")},
                  {"u1_scale", field("number", d.data.u1_scale, "u1 = u1_scale * u0.")},
                  {"phase_seed", field("integer", d.data.phase_seed,
                                       "Nonzero: random x-phases per mode from this seed.")}})},
          {"solver",
           group("Time stepping.",
                 {{"dt", field("number", d.solver.dt, "Time step; 0 selects cfl * dy.")},
                  {"cfl", field("number", d.solver.cfl, "dt / dy when dt = 0, in (0, 1].")},
                  {"eps_scaled_cfl", field("boolean", d.solver.eps_scaled_cfl,
                                           "hns only: auto dt = cfl * eps * dy.")},
                  {"t_final", field("number", d.solver.t_final, "Final time, > 0.")},
                  {"n_proj", field("integer", d.solver.n_proj,
                                   "hns divergence cleanup period in steps; 0 disables.")},
                  {"n_check", field("integer", d.solver.n_check,
                                    "Invariant check period in steps; 0 disables.")},
                  {"pressure_factor", field("number", d.solver.pressure_factor,
                                            "Quadratic coefficient of the formula pressure law.")},
                  {"pressure_law", field("string", d.solver.pressure_law,
                                         "Prandtl pressure: compatible or formula.")},
                  {"nonlinear", field("boolean", d.solver.nonlinear,
                                      "false drops the advection terms.")}})},
          {"experiment",
           group("What to run.",
                 {{"kind", field("string", to_string(d.experiment.kind),
                                 "prandtl, hns or sweep.")},
                  {"eps", field("number", d.experiment.eps, "hns aspect ratio, in (0, 1].")},
                  {"eps_list", field("array", d.experiment.eps_list,
                                     "Sweep values: >= 3, positive, strictly decreasing.")},
                  {"s", field("number", d.experiment.s, "Besov index of the E_s diagnostics.")},
                  {"hydrostatic_test", field("boolean", d.experiment.hydrostatic_test,
                                             "Sweep members use the hydrostatic pressure.")}})},
          {"output",
           group("Where and how often to write.",
                 {{"directory", field("string", d.output.directory,
                                      "Run directory; relative paths resolve against "
                                      "$GEVFLOW_OUTPUT_ROOT when set.")},
                  {"sample_every", field("integer", d.output.sample_every,
                                         "Diagnostics period in steps.")},
                  {"sample_interval", field("number", d.output.sample_interval,
                                            "Diagnostics period in time; > 0 overrides "
                                            "sample_every and shrinks dt to divide it.")},
                  {"snapshot_every", field("integer", d.output.snapshot_every,
                                           "Snapshot period in samples; 0 writes the "
                                           "final state only.")}})},
      });
  s["$schema"] = "https://json-schema.org/draft/2020-12/schema";
  s["title"] = "gevflow run configuration";
  return s;
}

std::filesystem::path resolve_output(const std::string& directory) {
  std::filesystem::path p(directory);
  if (p.is_relative()) {
    if (const char* root = std::getenv("GEVFLOW_OUTPUT_ROOT"); root && *root)
      return std::filesystem::path(root) / p;
  }
  return p;
}

}  // namespace gevflow
