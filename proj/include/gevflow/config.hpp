#pragma once
// Run configuration: one JSON document, every field optional with a
// documented default (see config_schema()).

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "gevflow/field.hpp"
#include "gevflow/gevrey.hpp"
#include "gevflow/prandtl.hpp"

namespace gevflow {

enum class ExperimentKind { Prandtl, Hns, Sweep };
std::string to_string(ExperimentKind k);

struct RunConfig {
  struct GridCfg {
    double lx = 2.0 * kPi;
    int nx = 128;
    int ny = 65;
  } grid;
  gevrey::GevreyParams gevrey;
  struct DataCfg {
    double amplitude = 0.05;
    int m_max = 8;
    std::string profile = "sin2pi";
    /// u1 = u1_scale * u0.
    double u1_scale = 0.0;
    /// Nonzero: every mode of u0 gets a pseudo-random phase from this seed.
    unsigned long long phase_seed = 0;
  } data;
  struct SolverCfg {
    /// 0 selects dt = cfl * dy (times eps for hns when eps_scaled_cfl).
    double dt = 0.0;
    double cfl = 0.25;
    bool eps_scaled_cfl = false;
    double t_final = 20.0;
    int n_proj = 50;
    int n_check = 10;
    double pressure_factor = 1.0;
    std::string pressure_law = "compatible";
    bool nonlinear = true;
  } solver;
  struct ExperimentCfg {
    ExperimentKind kind = ExperimentKind::Prandtl;
    double eps = 0.1;
    std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125};
    double s = 0.5;
    /// hns members use the hydrostatic pressure (self-comparison mode).
    bool hydrostatic_test = false;
  } experiment;
  struct OutputCfg {
    std::string directory = "runs/default";
    /// Sample every this many steps; ignored when sample_interval > 0.
    int sample_every = 10;
    /// Sample at multiples of this time; dt is shrunk to divide it.
    double sample_interval = 0.0;
    /// Snapshot every this many samples (0: final state only).
    int snapshot_every = 0;
  } output;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
  Grid make_grid() const;
  prandtl::PressureLaw law() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& file);
/// JSON-schema-style description with the default and meaning of every field.
nlohmann::json config_schema();

/// Resolves a relative output directory against $GEVFLOW_OUTPUT_ROOT when set.
std::filesystem::path resolve_output(const std::string& directory);

}  // namespace gevflow
