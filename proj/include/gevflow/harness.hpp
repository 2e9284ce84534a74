#pragma once
// Experiment orchestration behind the command-line tool: single runs, the
// eps-sweep against the Prandtl reference, reports and the property suite.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gevflow/config.hpp"
#include "gevflow/diagnostics.hpp"
#include "gevflow/gevrey.hpp"

namespace gevflow::harness {

namespace fs = std::filesystem;

/// "gevflow <semver> (<git describe>)"
std::string version_string();

/// Shared initial data for every solver of a configuration.
gevrey::GevreyData make_initial_data(const RunConfig& c, const Grid& g);

struct Schedule {
  double dt = 0.0;
  long steps = 0;
  long sample_every = 1;
  double t_end() const { return dt * static_cast<double>(steps); }
};

/// dt_max is the largest admissible step. With sample_interval > 0 the step
/// is shrunk to divide the interval and the run covers
/// ceil(t_final / interval) intervals; otherwise dt (explicit, or dt_max
/// shrunk to divide t_final) is used and samples are taken every
/// sample_every steps and at the last step.
Schedule make_schedule(double t_final, double dt_max, double explicit_dt,
                       int sample_every, double sample_interval);

/// Largest auto step for the configured solver (eps = 0 for Prandtl).
double auto_dt(const RunConfig& c, const Grid& g, double eps);

struct RunResult {
  fs::path dir;
  bool ok = true;
  std::string abort_reason;
  long steps = 0;
  double dt = 0.0;
  int samples = 0;
  double wall_seconds = 0.0;
  std::optional<diagnostics::DecayFit> decay;
};

/// Runs experiment.kind (prandtl or hns) and writes series.csv,
/// metadata.json, config.json and snapshots/ into the output directory.
/// A solver abort keeps the partial outputs and is reported, not thrown.
RunResult cmd_run(const RunConfig& c);

struct SweepMember {
  double eps = 0.0;
  double sup_l2_error = 0.0;
  double final_l2_error = 0.0;
  /// sup_t of the E1_0 composite of (u^eps - u, v^eps - v).
  double sup_e1_error = 0.0;
  long steps = 0;
  double dt = 0.0;
};

struct SweepResult {
  fs::path dir;
  std::vector<SweepMember> members;
  bool fit_skipped = false;
  double slope = 0.0;
  double intercept = 0.0;
  bool strictly_decreasing = false;
};

class sweep_failure : public std::runtime_error {
 public:
  sweep_failure(const std::string& what, double eps)
      : std::runtime_error(what), eps_(eps) {}
  double eps() const { return eps_; }

 private:
  double eps_;
};

/// Runs the Prandtl reference once and every hns member on the same data
/// and sample times; writes sweep.csv, errors.csv, fit.json and
/// metadata.json. Throws sweep_failure naming the member that aborted.
SweepResult cmd_sweep(const RunConfig& c);

/// Writes summary.txt plus plot-ready files (energy_terms.dat for a run,
/// loglog.dat for a sweep) and returns their paths.
std::vector<fs::path> cmd_report(const fs::path& dir);

struct VerifyOptions {
  int nx = 128;
  int ny = 33;
  unsigned long long seed = 20240611;
  /// Fault to inject: "" or "partition-of-unity".
  std::string inject;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  bool passed() const;
  nlohmann::json to_json() const;
};

VerifyReport cmd_verify(const VerifyOptions& opt);

}  // namespace gevflow::harness
