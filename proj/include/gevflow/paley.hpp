#pragma once
// Horizontal Littlewood-Paley machinery on the torus: dyadic blocks, Besov
// and Chemin-Lerner norms, Bony's paraproduct decomposition, Bernstein
// ratios.

#include <span>
#include <string>
#include <vector>

#include "gevflow/field.hpp"

namespace gevflow::paley {

/// Smooth cutoff: 1 on [0, 1], 0 on [4/3, inf), C-infinity and monotone.
double chi(double tau);
/// phi(tau) = chi(tau/2) - chi(tau); supported in (1, 8/3).
double phi(double tau);

struct BankOptions {
  /// Added to every phi sample. Only used for fault-injection checks.
  double phi_perturbation = 0.0;
};

/// phi/chi samples for every dyadic index the grid can resolve.
///
/// Blocks k_min..k_max are the indices whose phi(2^-k |xi|) is nonzero on
/// some nonzero grid frequency. S_{k_min - 1} reduces to the projection on
/// the m = 0 mode.
class DyadicBank {
 public:
  explicit DyadicBank(const Grid& g, BankOptions opts = {});

  const Grid& grid() const { return grid_; }
  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }
  int count() const { return k_max_ - k_min_ + 1; }

  /// phi(2^-k |xi_m|), m = 0..Nx/2.
  std::span<const double> phi_samples(int k) const;
  /// chi(2^-k |xi_m|) for any integer k.
  std::vector<double> chi_samples(int k) const;

  /// max over nonzero m of |sum_k phi(2^-k|xi_m|) - 1|
  double partition_residual() const;
  /// max over nonzero m of |chi(|xi_m|) + sum_{k>=0} phi(2^-k|xi_m|) - 1|
  double low_frequency_residual() const;
  /// True if every sampled phi/chi vanishes outside its prescribed support.
  bool supports_ok() const;

  /// L2 norm of each block, index k - k_min. The m = 0 mode is folded into
  /// block k_min.
  std::vector<double> block_norms(const Field& f) const;
  /// Squared block norms summed over several components.
  std::vector<double> block_norms_sq(std::span<const Field* const> comps) const;

 private:
  Grid grid_;
  int k_min_ = 0;
  int k_max_ = -1;
  std::vector<std::vector<double>> phi_;
};

Field delta_k(const DyadicBank& bank, const Field& f, int k);
Field S_k(const DyadicBank& bank, const Field& f, int k);

/// l1 sum over resolvable k of 2^{ks} ||Delta_k f||_{L2}.
double besov_norm(const DyadicBank& bank, const Field& f, double s);
/// Vector-valued version: the block norm of (f_1, ..., f_n) is the
/// Euclidean norm of the component block norms.
double besov_norm(const DyadicBank& bank, std::span<const Field* const> comps,
                  double s);

struct BonyParts {
  Field T_fg;  // sum_k S_{k-1} f Delta_k g
  Field T_gf;  // sum_k S_{k-1} g Delta_k f
  Field R;     // sum_k Delta_k f tilde-Delta_k g (+ mean(f) mean(g))
};

/// fg = T_f g + T_g f + R(f, g), all products dealiased.
BonyParts bony(const DyadicBank& bank, const Field& f, const Field& g);

struct BernsteinReport {
  bool skipped = false;
  int k = 0;
  /// ||dx f|| / (2^k ||f||): lies in the support ring [3/4, 8/3] of phi.
  double derivative_ratio = 0.0;
  /// ||f||_{L^inf_h(L^2_v)} / (2^{k/2} ||f||_{L^2}).
  double sup_ratio = 0.0;
  double lower = 0.75;
  double upper = 8.0 / 3.0;
  bool within() const {
    return skipped || (derivative_ratio >= lower && derivative_ratio <= upper);
  }
};

/// f is expected to be localized in block k already.
BernsteinReport bernstein_check(const Field& f, int k);

enum class TimeWeight { One, ThetaDot, ThetaDot2, ThetaDot3 };
std::string to_string(TimeWeight w);

/// Per-block time accumulators realizing
///   sum_k 2^{ks} ( int_0^t f(t') e^{2 r t'} ||Delta_k a||^2 dt' )^{1/2}
/// (trapezoid in time) and
///   sum_k 2^{ks} sup_{t'<=t} e^{r t'} ||Delta_k a||.
class NormSeries {
 public:
  NormSeries() = default;
  NormSeries(int k_min, int blocks, TimeWeight weight, double exp_rate);

  /// `block_sq` holds the squared block norms at time t (index k - k_min);
  /// `weight_value` is f(t). Throws std::invalid_argument if t goes back.
  void update(std::span<const double> block_sq, double t, double weight_value);
  void update(const DyadicBank& bank, const Field& f, double t,
              double weight_value);

  double l2_norm(double s) const;
  double linf_norm(double s) const;

  TimeWeight weight() const { return weight_; }
  double exp_rate() const { return rate_; }
  int k_min() const { return k_min_; }
  std::span<const double> integrals() const { return acc_; }
  std::span<const double> maxima() const { return max_; }
  double time() const { return t_; }
  int samples() const { return samples_; }

 private:
  int k_min_ = 0;
  TimeWeight weight_ = TimeWeight::One;
  double rate_ = 0.0;
  std::vector<double> acc_;
  std::vector<double> max_;
  std::vector<double> prev_;  // previous integrand per block
  double t_ = 0.0;
  int samples_ = 0;
};

}  // namespace gevflow::paley
