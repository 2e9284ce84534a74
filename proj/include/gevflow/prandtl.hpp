#pragma once
// Hyperbolic Prandtl system on the strip:
//   u_tt + u_t + u u_x + v u_y - u_yy + p_x = 0,  p_y = 0,  u_x + v_y = 0,
// with u = v = 0 at y = 0, 1. The vertical velocity is slaved to u and the
// pressure gradient is an explicit functional of the state.

#include <stdexcept>
#include <string>
#include <utility>

#include "gevflow/field.hpp"

namespace gevflow {

/// Raised by the time steppers on NaN/Inf, CFL violation or runaway growth.
class solver_abort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gevflow

namespace gevflow::prandtl {

struct State {
  Field u;
  Field ut;
  double t = 0.0;
};

enum class PressureLaw {
  /// y-independent gradient that keeps the discrete vertical mean of the
  /// acceleration at zero for every x-mode, m = 0 included.
  Compatible,
  /// u_y(1) - u_y(0) - factor * d/dx int_0^1 u^2 dy with one-sided wall
  /// derivatives; zero-mean in x.
  Formula,
};

struct Options {
  PressureLaw law = PressureLaw::Compatible;
  double quadratic_factor = 1.0;
  bool nonlinear = true;
  /// Hard limit on dt / dy.
  double max_cfl = 1.0;
  /// Invariant checks every this many steps (0 disables).
  int check_every = 10;
  double mean_tol = 1e-10;
};

/// v = -int_0^y dx(u) dy' (trapezoid), so v(y = 0) = 0.
Field recover_v(const Field& u);
/// max over modes of |v(y = 1)|
double top_residual(const Field& v);

/// Closed-form pressure gradient (y-independent field; m = 0 mode zero).
Field pressure_gradient(const Field& u, double factor);
/// Gradient that makes the trapezoidal vertical integral of
/// (accel - gradient) vanish when the wall rows are pinned: per mode, the
/// average of `accel` over interior rows.
Field compatible_pressure_gradient(const Field& accel);

struct Derivative {
  Field du;
  Field dut;
};

Derivative rhs(const State& s, const Options& opt = {});

/// Classical four-stage Runge-Kutta step on (u, u_t).
State step(const State& s, double dt, const Options& opt = {});

/// Removes the per-mode vertical mean of u0 and u1 using the profile
/// sin(pi y) scaled to unit discrete mean.
std::pair<Field, Field> enforce_compatibility(const Field& u0, const Field& u1);

/// max over x of |int_0^1 u(x, y) dy|
double max_vertical_mean(const Field& u);
/// max modulus over the wall rows of u and ut
double wall_residual(const State& s);

/// Step driver with periodic invariant checks.
class Integrator {
 public:
  explicit Integrator(Options opt = {}) : opt_(opt) {}
  void advance(State& s, double dt);
  const Options& options() const { return opt_; }
  long steps() const { return steps_; }
  /// Largest max_x |int u dy| seen at a check.
  double worst_mean() const { return worst_mean_; }

 private:
  Options opt_;
  long steps_ = 0;
  double worst_mean_ = 0.0;
};

}  // namespace gevflow::prandtl
