#pragma once
// Scaled anisotropic hyperbolic Navier-Stokes system on the strip:
//   u_tt + u_t + u u_x + v u_y - eps^2 u_xx - u_yy + p_x = 0
//   eps^2 (v_tt + v_t + u v_x + v v_y - eps^2 v_xx - v_yy) + p_y = 0
//   u_x + v_y = 0,   (u, v) = 0 at y = 0, 1.
//
// Incompressibility is imposed in box form on the cell faces y_{j+1/2}:
//   (v_{j+1} - v_j)/dy + i xi (u_j + u_{j+1})/2 = 0,
// which is exactly the constraint satisfied by v = recover_v(u). The
// pressure lives on the same faces; its gradient is the adjoint of that
// divergence, so each x-mode needs one symmetric tridiagonal solve.

#include <vector>

#include "gevflow/field.hpp"
#include "gevflow/prandtl.hpp"

namespace gevflow::hns {

struct State {
  Field u, v, ut, vt;
  double eps = 1.0;
  double t = 0.0;
};

/// Values on the Ny - 1 faces y_{j+1/2}, for every stored x-mode.
struct FaceField {
  int faces = 0;
  int modes = 0;
  std::vector<cplx> data;  // [face][mode]

  FaceField() = default;
  FaceField(int f, int m) : faces(f), modes(m), data(static_cast<std::size_t>(f) * m) {}
  cplx& at(int m, int h) { return data[static_cast<std::size_t>(h) * modes + m]; }
  const cplx& at(int m, int h) const {
    return data[static_cast<std::size_t>(h) * modes + m];
  }
};

/// Box divergence of (u, v) on the faces.
FaceField divergence(const Field& u, const Field& v);
/// L2 norm of a face field (Parseval in x, dy-weighted sum over faces).
double face_norm(const Grid& g, const FaceField& f);
/// ||div(u, v)|| / (||u_x|| + ||v_y||), both parts measured on the faces;
/// 0 for a zero state.
double divergence_ratio(const Field& u, const Field& v);

struct Options {
  bool nonlinear = true;
  /// Hard limit on dt / dy.
  double max_cfl = 1.0;
  /// Divergence cleanup every this many steps (0 disables).
  int n_proj = 50;
  /// Invariant and energy-growth checks every this many steps (0 disables).
  int n_check = 10;
  double tol_div = 1e-6;
  /// Test mode: replace the anisotropic pressure by the hydrostatic
  /// (Prandtl) pressure law and drop the eps^2 dxx terms, so the stepper
  /// reproduces prandtl::step.
  bool hydrostatic = false;
  /// Record the divergence of every stage acceleration.
  bool track_stage_divergence = true;
};

struct Pressure {
  FaceField p;
  /// Uniform x-gradient added to the m = 0 mode (mean pressure drop that
  /// keeps the x-averaged flux at zero).
  cplx mean_gradient{};
  /// dy * sum of the m = 0 right-hand side before it was projected out.
  double solvability_defect = 0.0;
};

struct Derivative {
  Field du, dv, dut, dvt;
};

class Solver {
 public:
  Solver(const Grid& g, double eps, Options opt = {});

  double eps() const { return eps_; }
  const Options& options() const { return opt_; }

  /// Pressure for the unconstrained accelerations (f1, f2) (wall rows are
  /// ignored). The constrained accelerations are f - W grad p.
  Pressure pressure_solve(const Field& f1, const Field& f2) const;
  /// Applies -W grad p (and the mean gradient) to (f1, f2) in place.
  void apply_pressure(const Pressure& p, Field& f1, Field& f2) const;
  /// Solves C W C^* p = rhs on the faces, mode by mode (C the box
  /// divergence, W = diag(1, eps^-2)). The m = 0 data is first made
  /// solvable by removing its mean; `defect` receives dy * |sum rhs_0|.
  /// The m = 0 potential has zero face mean; modes above the dealiasing
  /// limit are zero.
  FaceField solve_poisson(const FaceField& rhs, double* defect = nullptr) const;

  Derivative rhs(const State& s);
  State step(const State& s, double dt);
  /// Projects (u, v) and (ut, vt) onto the box-divergence-free set.
  /// Returns the L2 size of the correction in `correction` if given.
  State divergence_cleanup(const State& s, double* correction = nullptr) const;

  /// Largest stage-acceleration divergence ratio since the last reset.
  double max_stage_divergence() const { return max_stage_div_; }
  void reset_stats() { max_stage_div_ = 0.0; }

 private:
  Grid grid_;
  double eps_;
  Options opt_;
  double max_stage_div_ = 0.0;
};

/// v0 = recover_v(u0), v1 = recover_v(u1). Throws std::invalid_argument if
/// u0 or u1 has a vertical mean that makes v miss the top wall.
State make_hns_data(const Field& u0, const Field& u1, double eps);

double max_wall(const State& s);
/// sqrt(||u||^2 + eps^2||v||^2 + ||ut||^2 + eps^2||vt||^2)
double energy_norm(const State& s);

/// Step driver: cleanup cadence, invariant checks, runaway detection.
class Integrator {
 public:
  Integrator(const Grid& g, double eps, Options opt = {}) : solver_(g, eps, opt) {}
  void advance(State& s, double dt);
  Solver& solver() { return solver_; }
  long steps() const { return steps_; }
  double worst_divergence() const { return worst_div_; }
  double last_correction() const { return last_correction_; }

 private:
  Solver solver_;
  long steps_ = 0;
  double worst_div_ = 0.0;
  double last_energy_ = -1.0;
  double last_correction_ = 0.0;
};

}  // namespace gevflow::hns
