#pragma once
// Weighted energy functionals accumulated along a run, decay fits.
//
// E_s(u)(t) has seven Chemin-Lerner pieces:
//   1  ||e^{Kt}(u, dy u, ut)_Phi||           Linf_t B^s
//   2  sqrt(aK) ||e^{3Kt/4} u_Phi||          Linf_t B^{s+1/4}
//   3  aK ||e^{Kt/2} u_Phi||                 Linf_t B^{s+1/2}
//   4  sqrt(lambda) ||e^{Kt}(u, ut, dy u)_Phi||  L2_{theta'} B^{s+1/4}
//   5  lambda ||e^{Kt} u_Phi||               L2_{theta'^2} B^{s+1/2}
//   6  lambda^{3/2} ||e^{Kt} u_Phi||         L2_{theta'^3} B^{s+3/4}
//   7  ||e^{Kt}(ut, dy u)_Phi||              L2_t B^s
// The short composite keeps 1, 2, 3 and 7; the full one sums all seven.
//
// E1(u, v)(t), s = 1/2, with U = (u, eps v):
//   1  ||e^{Kt}(U, eps dx U, dy U, dt U)_Phi||  Linf_t B^{1/2}
//   2  sqrt(aK) ||e^{3Kt/4} U_Phi||             Linf_t B^{3/4}
//   3  aK ||e^{Kt/2} U_Phi||                    Linf_t B^1
//   4  ||e^{Kt}(eps dx U, dy U, dt U)_Phi||     L2_t B^{1/2}
// With rate_scale = 0 every exponential weight is dropped (E1_0).

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "gevflow/field.hpp"
#include "gevflow/gevrey.hpp"
#include "gevflow/paley.hpp"

namespace gevflow::diagnostics {

/// |lambda delta^{1/2} - a K/4|. The prefactors of terms 2 and 3 rely on it.
double weight_identity_residual(const gevrey::GevreyParams& p);
/// Throws std::invalid_argument if the residual exceeds 1e-14 (a K/4).
void check_weight_identity(const gevrey::GevreyParams& p);

struct EsSample {
  double t = 0.0;
  double radius = 0.0;
  double trust_horizon = 0.0;
  int masked = 0;
  /// e^{Kt} ||(.)_Phi(t)||_{B^s} for u, dy u, ut.
  double u_Bs = 0.0, dyu_Bs = 0.0, ut_Bs = 0.0;
  std::array<double, 7> terms{};
  double composite_short = 0.0;
  double composite_full = 0.0;
};

class EsTracker {
 public:
  EsTracker(const paley::DyadicBank& bank, double s, const gevrey::GevreyParams& p);

  /// Times must be nondecreasing.
  const EsSample& add(const Field& u, const Field& ut, double t);
  const EsSample& last() const { return last_; }
  double s() const { return s_; }

  static std::array<std::string, 7> term_names();

 private:
  const paley::DyadicBank* bank_;
  double s_;
  gevrey::GevreyParams p_;
  std::array<paley::NormSeries, 7> series_;
  EsSample last_;
};

struct E1Sample {
  double t = 0.0;
  std::array<double, 4> terms{};
  double composite = 0.0;
};

class E1Tracker {
 public:
  E1Tracker(const paley::DyadicBank& bank, double eps,
            const gevrey::GevreyParams& p, double rate_scale = 1.0);

  const E1Sample& add(const Field& u, const Field& v, const Field& ut,
                      const Field& vt, double t);
  const E1Sample& last() const { return last_; }

  static std::array<std::string, 4> term_names();

 private:
  const paley::DyadicBank* bank_;
  double eps_;
  gevrey::GevreyParams p_;
  double rate_scale_;
  std::array<paley::NormSeries, 4> series_;
  E1Sample last_;
};

/// Whole-run versions of the trackers; returns one sample per input time.
std::vector<EsSample> energy_E_s(const paley::DyadicBank& bank,
                                 const std::vector<double>& times,
                                 const std::vector<Field>& u,
                                 const std::vector<Field>& ut, double s,
                                 const gevrey::GevreyParams& p);
std::vector<E1Sample> energy_E1(const paley::DyadicBank& bank,
                                const std::vector<double>& times,
                                const std::vector<Field>& u,
                                const std::vector<Field>& v,
                                const std::vector<Field>& ut,
                                const std::vector<Field>& vt, double eps,
                                const gevrey::GevreyParams& p,
                                double rate_scale = 1.0);

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  int used = 0;
  int trimmed = 0;
  std::string warning;
};

/// Least-squares slope of log(value) against t over t0 <= t <= t1.
/// Nonpositive values are dropped and counted in `trimmed`. Throws
/// std::invalid_argument if fewer than two points remain.
DecayFit decay_fit(const std::vector<std::pair<double, double>>& series,
                   double t0, double t1);

}  // namespace gevflow::diagnostics
