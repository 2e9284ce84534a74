// Command-line front end: verify, run, sweep, report, config.

#include <malloc.h>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "gevflow/config.hpp"
#include "gevflow/harness.hpp"
#include "gevflow/simd.hpp"

namespace hx = gevflow::harness;

int main(int argc, char** argv) {
  // The steppers allocate and free field-sized temporaries every stage; keep
  // freed heap top instead of returning it to the kernel each time.
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
  CLI::App app{"Hyperbolic Prandtl / anisotropic Navier-Stokes experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hx::version_string());
  std::string simd;
  app.add_option("--simd", simd, "Kernel backend: scalar or avx2 (default: best available)");

  auto* verify = app.add_subcommand("verify", "Run the property suite");
  hx::VerifyOptions vopt;
  bool vjson = false;
  std::string vreport;
  verify->add_option("--nx", vopt.nx, "x points")->capture_default_str();
  verify->add_option("--ny", vopt.ny, "y nodes")->capture_default_str();
  verify->add_option("--seed", vopt.seed, "RNG seed")->capture_default_str();
  verify->add_option("--inject", vopt.inject, "Inject a fault (partition-of-unity)");
  verify->add_flag("--json", vjson, "Print the report as JSON");
  verify->add_option("--report", vreport, "Also write the JSON report to this file");

  auto* run = app.add_subcommand("run", "Run one solver");
  std::string run_cfg;
  run->add_option("--config", run_cfg, "Config JSON")->required()->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "eps-sweep of hns against Prandtl");
  std::string sweep_cfg;
  sweep->add_option("--config", sweep_cfg, "Config JSON")->required()->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "Summarize a run or sweep directory");
  std::string report_dir;
  report->add_option("dir", report_dir, "Output directory")->required();

  auto* config = app.add_subcommand("config", "Configuration helpers");
  bool schema = false, defaults = false;
  config->add_flag("--schema", schema, "Print the documented schema");
  config->add_flag("--defaults", defaults, "Print a config with every default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every real usage error exits 2.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!simd.empty()) {
    const auto b = simd == "scalar" ? gevflow::simd::Backend::Scalar
                 : simd == "avx2"   ? gevflow::simd::Backend::Avx2
                                    : throw CLI::ValidationError("--simd", "scalar or avx2");
    if (!gevflow::simd::set_backend(b)) {
      std::cerr << "error: SIMD backend '" << simd << "' is not available on this machine\n";
      return 2;
    }
  }

  try {
    if (*verify) {
      const auto rep = hx::cmd_verify(vopt);
      const auto j = rep.to_json();
      if (!vreport.empty()) {
        std::ofstream os(vreport);
        os << j.dump(2) << '\n';
      }
      if (vjson) {
        std::cout << j.dump(2) << '\n';
      } else {
        for (const auto& p : rep.properties)
          std::printf("%-4s %-28s value %-12.4g threshold %-10.3g %s\n", p.passed ? "ok" : "FAIL",
                      p.name.c_str(), p.value, p.threshold, p.detail.c_str());
        std::printf("%s\n", rep.passed() ? "verify: all properties hold" : "verify: FAILED");
      }
      return rep.passed() ? 0 : 1;
    }
    if (*run) {
      const auto cfg = gevflow::load_config(run_cfg);
      const auto r = hx::cmd_run(cfg);
      std::printf("run %s: %s, %ld steps of dt %.6g, %d samples, %.2f s\n", r.dir.c_str(),
                  r.ok ? "ok" : "aborted", r.steps, r.dt, r.samples, r.wall_seconds);
      if (r.decay) std::printf("L2 decay rate %.6g (r^2 %.4f)\n", r.decay->rate, r.decay->r2);
      if (!r.ok) {
        std::fprintf(stderr, "abort: %s\n", r.abort_reason.c_str());
        return 1;
      }
      return 0;
    }
    if (*sweep) {
      const auto cfg = gevflow::load_config(sweep_cfg);
      const auto s = hx::cmd_sweep(cfg);
      for (const auto& m : s.members)
        std::printf("eps %-8.4g sup L2 error %.6e  final %.6e  E1_0 %.6e\n", m.eps,
                    m.sup_l2_error, m.final_l2_error, m.sup_e1_error);
      if (s.fit_skipped)
        std::printf("slope fit skipped\n");
      else
        std::printf("log-log slope %.4f\n", s.slope);
      std::printf("results in %s\n", s.dir.c_str());
      return 0;
    }
    if (*report) {
      for (const auto& f : hx::cmd_report(report_dir)) std::printf("wrote %s\n", f.c_str());
      return 0;
    }
    if (*config) {
      if (schema) {
        std::cout << gevflow::config_schema().dump(2) << '\n';
      } else if (defaults) {
        std::cout << gevflow::config_to_json(gevflow::RunConfig{}).dump(2) << '\n';
      } else {
        std::cerr << "config: pass --schema or --defaults\n";
        return 2;
      }
      return 0;
    }
  } catch (const hx::sweep_failure& e) {
    std::cerr << "sweep failed (member eps = " << e.eps() << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
