#pragma once
// Gevrey-2 phase: radius loss theta(t), phase Phi(t, xi), the weighted
// unknowns u_Phi and the initial-data norms.

#include <stdexcept>
#include <string>
#include <utility>

#include "gevflow/field.hpp"
#include "gevflow/paley.hpp"

namespace gevflow::gevrey {

/// Sharp Poincare constant for functions vanishing at y = 0 and y = 1.
inline constexpr double kSharpPoincare = 1.0 / (kPi * kPi);

struct GevreyParams {
  double a = 0.5;          // initial radius
  double lambda = 1.0;     // loss-rate multiplier
  double poincare = kSharpPoincare;

  /// Throws std::invalid_argument unless a > 0, lambda >= 1, poincare > 0.
  void validate() const;

  /// min(1/6, 1/(4(1 + K)))
  double kappa() const;
  /// (a kappa / (4 lambda))^2, always recomputed.
  double delta() const;
  /// Closed form 2 delta^{1/2}/kappa (1 - e^{-kappa t/2}); t >= 0.
  double theta(double t) const;
  double theta_dot(double t) const;
  /// a - lambda theta(t) = (a/2)(1 + e^{-kappa t/2})
  double radius(double t) const;
  /// (a - lambda theta(t)) |xi|^{1/2}
  double phase(double t, double xi) const;
};

class gevrey_overflow : public std::runtime_error {
 public:
  gevrey_overflow(const std::string& what, double phase)
      : std::runtime_error(what), phase_(phase) {}
  double phase() const { return phase_; }

 private:
  double phase_;
};

/// Coefficients below this fraction of the field's largest modulus are
/// zeroed before a positive Gevrey weight is applied.
inline constexpr double kSpectralFloor = 1e-13;

struct Weighted {
  Field field;
  /// Largest |xi| whose weighted relative coefficient log-size
  /// Phi + log(|c|/max|c|) exceeds -3; 0 if none.
  double trust_horizon = 0.0;
  /// Coefficients zeroed by the spectral floor.
  int masked = 0;
};

/// Multiplies every mode by exp(sign * Phi(t, xi_m)). Throws
/// gevrey_overflow (for sign = +1) when exp(Phi) at the Nyquist frequency
/// would leave the double range.
Weighted apply_gevrey(const Field& f, double t, const GevreyParams& p, int sign);

/// Multiplies by exp(+a |xi|^{1/2}) (the t = 0 weight) with the same floor.
Field initial_weight(const Field& f, const GevreyParams& p);

enum class Profile { Sin2Pi, Sin4Pi, SinPiSin2Pi };
Profile parse_profile(const std::string& name);
std::string to_string(Profile p);
double profile_value(Profile p, double y);

struct GevreyData {
  Field u0;
  Field u1;
};

/// u0 has c e^{-a|xi_m|^{1/2}} P(y) on 1 <= |m| <= m_max; u1 = 0.
/// Throws std::invalid_argument if P violates P(0) = P(1) = 0 or has a
/// nonzero vertical mean on the grid, or m_max is out of range.
GevreyData make_gevrey_data(const Grid& g, const GevreyParams& p,
                            double amplitude, int m_max, Profile profile);
/// Same, for an arbitrary sampled profile (values at y_j).
GevreyData make_gevrey_data(const Grid& g, const GevreyParams& p,
                            double amplitude, int m_max,
                            const std::vector<double>& profile);

/// ||e^{a|D|^{1/2}}(u0, u1, dy u0)||_{B^s} + sqrt(a kappa)||e^{..}u0||_{B^{s+1/4}}
///   + a kappa ||e^{..}u0||_{B^{s+1/2}}
double initial_norm_H0(const paley::DyadicBank& bank, const Field& u0,
                       const Field& u1, double s, const GevreyParams& p);

/// ||e^{..}(u0, eps v0, eps dx(u0, eps v0), dy(u0, eps v0), u1, eps v1)||_{B^{1/2}}
///   + sqrt(a kappa)||e^{..}(u0, eps v0)||_{B^{3/4}} + a kappa ||e^{..}(u0, eps v0)||_{B^1}
double initial_norm_H1(const paley::DyadicBank& bank, const Field& u0,
                       const Field& v0, const Field& u1, const Field& v1,
                       double eps, const GevreyParams& p);

}  // namespace gevflow::gevrey
