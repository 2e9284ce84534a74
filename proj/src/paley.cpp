#include "gevflow/paley.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gevflow::paley {

namespace {

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Smooth step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump(t);
  return a / (a + bump(1.0 - t));
}

// Per-mode energy Lx * w_m * int_0^1 |c_m(y)|^2 dy with w_m the
// multiplicity of +-m in the full spectrum.
std::vector<double> mode_energy(const Field& f) {
  const Grid& g = f.grid();
  const int nyq = g.nx() / 2;
  const double h = g.dy();
  std::vector<double> e(g.modes(), 0.0);
  for (int j = 0; j < g.ny(); ++j) {
    const double w = (j == 0 || j == g.ny() - 1) ? 0.5 * h : h;
    auto r = f.row(j);
    for (int m = 0; m < g.modes(); ++m) e[m] += w * std::norm(r[m]);
  }
  for (int m = 0; m < g.modes(); ++m)
    e[m] *= g.lx() * ((m == 0 || m == nyq) ? 1.0 : 2.0);
  return e;
}

Field apply_multiplier(const Field& f, std::span<const double> mult) {
  Field out = f;
  for (int j = 0; j < out.ny(); ++j) {
    auto r = out.row(j);
    for (int m = 0; m < out.modes(); ++m) r[m] *= mult[m];
  }
  return out;
}

}  // namespace

double chi(double tau) { return 1.0 - smooth_step(3.0 * (std::abs(tau) - 1.0)); }

double phi(double tau) {
  const double t = std::abs(tau);
  return chi(0.5 * t) - chi(t);
}

DyadicBank::DyadicBank(const Grid& g, BankOptions opts) : grid_(g) {
  const double xi_lo = std::abs(g.xi(1));
  const double xi_hi = std::abs(g.xi(g.nx() / 2));
  const int lo = static_cast<int>(std::floor(std::log2(xi_lo))) - 3;
  const int hi = static_cast<int>(std::ceil(std::log2(xi_hi))) + 3;
  k_min_ = hi + 1;
  k_max_ = lo - 1;
  for (int k = lo; k <= hi; ++k) {
    for (int m = 1; m < g.modes(); ++m) {
      if (phi(std::ldexp(std::abs(g.xi(m)), -k)) != 0.0) {
        k_min_ = std::min(k_min_, k);
        k_max_ = std::max(k_max_, k);
        break;
      }
    }
  }
  for (int k = k_min_; k <= k_max_; ++k) {
    std::vector<double> row(g.modes());
    for (int m = 0; m < g.modes(); ++m)
      row[m] = phi(std::ldexp(std::abs(g.xi(m)), -k)) + opts.phi_perturbation;
    phi_.push_back(std::move(row));
  }
}

std::span<const double> DyadicBank::phi_samples(int k) const {
  if (k < k_min_ || k > k_max_)
    throw std::out_of_range("DyadicBank: block " + std::to_string(k) +
                            " outside [" + std::to_string(k_min_) + ", " +
                            std::to_string(k_max_) + "]");
  return phi_[k - k_min_];
}

std::vector<double> DyadicBank::chi_samples(int k) const {
  std::vector<double> out(grid_.modes());
  for (int m = 0; m < grid_.modes(); ++m)
    out[m] = chi(std::ldexp(std::abs(grid_.xi(m)), -k));
  return out;
}

double DyadicBank::partition_residual() const {
  double worst = 0.0;
  for (int m = 1; m < grid_.modes(); ++m) {
    double s = 0.0;
    for (int k = k_min_; k <= k_max_; ++k) s += phi_[k - k_min_][m];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

double DyadicBank::low_frequency_residual() const {
  double worst = 0.0;
  for (int m = 1; m < grid_.modes(); ++m) {
    const double xi = std::abs(grid_.xi(m));
    double s = chi(xi);
    for (int k = 0; k <= k_max_; ++k)
      s += (k >= k_min_) ? phi_[k - k_min_][m] : phi(std::ldexp(xi, -k));
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

bool DyadicBank::supports_ok() const {
  for (int k = k_min_; k <= k_max_; ++k) {
    for (int m = 0; m < grid_.modes(); ++m) {
      const double tau = std::ldexp(std::abs(grid_.xi(m)), -k);
      if (phi_[k - k_min_][m] != 0.0 && (tau < 0.75 || tau > 8.0 / 3.0))
        return false;
      if (chi(tau) != 0.0 && tau > 4.0 / 3.0) return false;
    }
  }
  return true;
}

std::vector<double> DyadicBank::block_norms_sq(
    std::span<const Field* const> comps) const {
  std::vector<double> out(count(), 0.0);
  for (const Field* f : comps) {
    const auto e = mode_energy(*f);
    for (int k = k_min_; k <= k_max_; ++k) {
      const auto& p = phi_[k - k_min_];
      double s = 0.0;
      for (int m = 1; m < grid_.modes(); ++m) s += p[m] * p[m] * e[m];
      out[k - k_min_] += s;
    }
    if (!out.empty()) out[0] += e[0];
  }
  return out;
}

std::vector<double> DyadicBank::block_norms(const Field& f) const {
  const Field* comps[] = {&f};
  auto sq = block_norms_sq(comps);
  for (auto& v : sq) v = std::sqrt(v);
  return sq;
}

Field delta_k(const DyadicBank& bank, const Field& f, int k) {
  if (k >= bank.k_min() && k <= bank.k_max())
    return apply_multiplier(f, bank.phi_samples(k));
  const Grid& g = f.grid();
  std::vector<double> mult(g.modes());
  for (int m = 0; m < g.modes(); ++m)
    mult[m] = m == 0 ? 0.0 : phi(std::ldexp(std::abs(g.xi(m)), -k));
  return apply_multiplier(f, mult);
}

Field S_k(const DyadicBank& bank, const Field& f, int k) {
  return apply_multiplier(f, bank.chi_samples(k));
}

double besov_norm(const DyadicBank& bank, std::span<const Field* const> comps,
                  double s) {
  const auto sq = bank.block_norms_sq(comps);
  double total = 0.0;
  for (int k = bank.k_min(); k <= bank.k_max(); ++k)
    total += std::exp2(k * s) * std::sqrt(sq[k - bank.k_min()]);
  return total;
}

double besov_norm(const DyadicBank& bank, const Field& f, double s) {
  const Field* comps[] = {&f};
  return besov_norm(bank, comps, s);
}

BonyParts bony(const DyadicBank& bank, const Field& f, const Field& g) {
  require_same_grid(f, g, "bony");
  const Grid& grid = f.grid();
  BonyParts out{Field(grid), Field(grid), Field(grid)};

  std::vector<Field> df, dg;
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
    df.push_back(delta_k(bank, f, k));
    dg.push_back(delta_k(bank, g, k));
  }
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
    const int i = k - bank.k_min();
    out.T_fg += product(S_k(bank, f, k - 1), dg[i]);
    out.T_gf += product(S_k(bank, g, k - 1), df[i]);
    Field tilde(grid);
    for (int kk = std::max(k - 1, bank.k_min()); kk <= std::min(k + 1, bank.k_max()); ++kk)
      tilde += dg[kk - bank.k_min()];
    out.R += product(df[i], tilde);
  }
  // The mean modes sit below every block: mean x mean is the only
  // low-low interaction not already inside a paraproduct.
  Field fm(grid), gm(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    fm.at(0, j) = f.at(0, j);
    gm.at(0, j) = g.at(0, j);
  }
  out.R += product(fm, gm);
  return out;
}

BernsteinReport bernstein_check(const Field& f, int k) {
  BernsteinReport rep;
  rep.k = k;
  const double norm = l2_norm(f);
  if (!(max_modulus(f) > 1e-15) || norm == 0.0) {
    rep.skipped = true;
    return rep;
  }
  rep.derivative_ratio = l2_norm(dx(f)) / (std::exp2(k) * norm);

  const Grid& g = f.grid();
  const PhysicalField v = to_physical(f);
  const double h = g.dy();
  double sup = 0.0;
  for (int i = 0; i < g.nx(); ++i) {
    double col = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
      const double w = (j == 0 || j == g.ny() - 1) ? 0.5 * h : h;
      col += w * v.at(i, j) * v.at(i, j);
    }
    sup = std::max(sup, std::sqrt(col));
  }
  rep.sup_ratio = sup / (std::exp2(0.5 * k) * norm);
  return rep;
}

std::string to_string(TimeWeight w) {
  switch (w) {
    case TimeWeight::One: return "1";
    case TimeWeight::ThetaDot: return "thetadot";
    case TimeWeight::ThetaDot2: return "thetadot2";
    case TimeWeight::ThetaDot3: return "thetadot3";
  }
  return "?";
}

NormSeries::NormSeries(int k_min, int blocks, TimeWeight weight, double exp_rate)
    : k_min_(k_min),
      weight_(weight),
      rate_(exp_rate),
      acc_(blocks, 0.0),
      max_(blocks, 0.0),
      prev_(blocks, 0.0) {}

void NormSeries::update(std::span<const double> block_sq, double t,
                        double weight_value) {
  if (block_sq.size() != acc_.size())
    throw std::invalid_argument("NormSeries: block count mismatch");
  if (samples_ > 0 && t < t_)
    throw std::invalid_argument("NormSeries: time went backwards (" +
                                std::to_string(t) + " < " + std::to_string(t_) +
                                ")");
  const double grow = std::exp(rate_ * t);
  const double grow2 = grow * grow;
  const double dt = samples_ > 0 ? t - t_ : 0.0;
  for (std::size_t k = 0; k < acc_.size(); ++k) {
    const double cur = weight_value * grow2 * block_sq[k];
    if (samples_ > 0) acc_[k] += 0.5 * dt * (prev_[k] + cur);
    prev_[k] = cur;
    max_[k] = std::max(max_[k], grow * std::sqrt(block_sq[k]));
  }
  t_ = t;
  ++samples_;
}

void NormSeries::update(const DyadicBank& bank, const Field& f, double t,
                        double weight_value) {
  const Field* comps[] = {&f};
  update(bank.block_norms_sq(comps), t, weight_value);
}

double NormSeries::l2_norm(double s) const {
  double total = 0.0;
  for (std::size_t k = 0; k < acc_.size(); ++k)
    total += std::exp2((k_min_ + static_cast<int>(k)) * s) * std::sqrt(acc_[k]);
  return total;
}

double NormSeries::linf_norm(double s) const {
  double total = 0.0;
  for (std::size_t k = 0; k < max_.size(); ++k)
    total += std::exp2((k_min_ + static_cast<int>(k)) * s) * max_[k];
  return total;
}

}  // namespace gevflow::paley
