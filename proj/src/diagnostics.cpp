#include "gevflow/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace gevflow::diagnostics {

using paley::NormSeries;
using paley::TimeWeight;

double weight_identity_residual(const gevrey::GevreyParams& p) {
  return std::abs(p.lambda * std::sqrt(p.delta()) - 0.25 * p.a * p.kappa());
}

void check_weight_identity(const gevrey::GevreyParams& p) {
  const double target = 0.25 * p.a * p.kappa();
  if (weight_identity_residual(p) > 1e-14 * target)
    throw std::invalid_argument("lambda delta^{1/2} != a kappa / 4: residual " +
                                std::to_string(weight_identity_residual(p)));
}

namespace {

double weight_value(TimeWeight w, const gevrey::GevreyParams& p, double t) {
  const double td = p.theta_dot(t);
  switch (w) {
    case TimeWeight::One: return 1.0;
    case TimeWeight::ThetaDot: return td;
    case TimeWeight::ThetaDot2: return td * td;
    case TimeWeight::ThetaDot3: return td * td * td;
  }
  return 1.0;
}

}  // namespace

EsTracker::EsTracker(const paley::DyadicBank& bank, double s,
                     const gevrey::GevreyParams& p)
    : bank_(&bank), s_(s), p_(p) {
  p_.validate();
  check_weight_identity(p_);
  const double k = p_.kappa();
  const int kmin = bank.k_min(), n = bank.count();
  series_ = {NormSeries(kmin, n, TimeWeight::One, k),
             NormSeries(kmin, n, TimeWeight::One, 0.75 * k),
             NormSeries(kmin, n, TimeWeight::One, 0.5 * k),
             NormSeries(kmin, n, TimeWeight::ThetaDot, k),
             NormSeries(kmin, n, TimeWeight::ThetaDot2, k),
             NormSeries(kmin, n, TimeWeight::ThetaDot3, k),
             NormSeries(kmin, n, TimeWeight::One, k)};
}

std::array<std::string, 7> EsTracker::term_names() {
  return {"E_s.term1.Linf.B_s",          "E_s.term2.Linf.B_s+1/4",
          "E_s.term3.Linf.B_s+1/2",      "E_s.term4.L2_thetadot.B_s+1/4",
          "E_s.term5.L2_thetadot2.B_s+1/2", "E_s.term6.L2_thetadot3.B_s+3/4",
          "E_s.term7.L2.B_s"};
}

const EsSample& EsTracker::add(const Field& u, const Field& ut, double t) {
  require_same_grid(u, ut, "EsTracker::add");
  const auto wu = gevrey::apply_gevrey(u, t, p_, +1);
  const auto wt = gevrey::apply_gevrey(ut, t, p_, +1);
  const Field wy = dy(wu.field);
  const paley::DyadicBank& b = *bank_;

  const Field* triple[] = {&wu.field, &wy, &wt.field};
  const Field* single[] = {&wu.field};
  const Field* pair[] = {&wt.field, &wy};
  const auto sq_triple = b.block_norms_sq(triple);
  const auto sq_u = b.block_norms_sq(single);
  const auto sq_pair = b.block_norms_sq(pair);

  const std::vector<double>* inputs[] = {&sq_triple, &sq_u, &sq_u, &sq_triple,
                                         &sq_u,      &sq_u, &sq_pair};
  for (int i = 0; i < 7; ++i)
    series_[i].update(*inputs[i], t, weight_value(series_[i].weight(), p_, t));

  const double ak = p_.a * p_.kappa();
  const double l = p_.lambda;
  EsSample& r = last_;
  r.t = t;
  r.radius = p_.radius(t);
  r.trust_horizon = wu.trust_horizon;
  r.masked = wu.masked + wt.masked;
  const double grow = std::exp(p_.kappa() * t);
  r.u_Bs = grow * paley::besov_norm(b, wu.field, s_);
  r.dyu_Bs = grow * paley::besov_norm(b, wy, s_);
  r.ut_Bs = grow * paley::besov_norm(b, wt.field, s_);
  r.terms = {series_[0].linf_norm(s_),
             std::sqrt(ak) * series_[1].linf_norm(s_ + 0.25),
             ak * series_[2].linf_norm(s_ + 0.5),
             std::sqrt(l) * series_[3].l2_norm(s_ + 0.25),
             l * series_[4].l2_norm(s_ + 0.5),
             l * std::sqrt(l) * series_[5].l2_norm(s_ + 0.75),
             series_[6].l2_norm(s_)};
  r.composite_short = r.terms[0] + r.terms[1] + r.terms[2] + r.terms[6];
  r.composite_full = 0.0;
  for (double v : r.terms) r.composite_full += v;
  return r;
}

E1Tracker::E1Tracker(const paley::DyadicBank& bank, double eps,
                     const gevrey::GevreyParams& p, double rate_scale)
    : bank_(&bank), eps_(eps), p_(p), rate_scale_(rate_scale) {
  p_.validate();
  check_weight_identity(p_);
  if (!(eps > 0.0)) throw std::invalid_argument("E1Tracker: eps must be positive");
  const double k = rate_scale * p_.kappa();
  const int kmin = bank.k_min(), n = bank.count();
  series_ = {NormSeries(kmin, n, TimeWeight::One, k),
             NormSeries(kmin, n, TimeWeight::One, 0.75 * k),
             NormSeries(kmin, n, TimeWeight::One, 0.5 * k),
             NormSeries(kmin, n, TimeWeight::One, k)};
}

std::array<std::string, 4> E1Tracker::term_names() {
  return {"E1.term1.Linf.B_1/2", "E1.term2.Linf.B_3/4", "E1.term3.Linf.B_1",
          "E1.term4.L2.B_1/2"};
}

const E1Sample& E1Tracker::add(const Field& u, const Field& v, const Field& ut,
                               const Field& vt, double t) {
  const double e = eps_;
  const Field wu = gevrey::apply_gevrey(u, t, p_, +1).field;
  const Field wv = gevrey::apply_gevrey(e * v, t, p_, +1).field;
  const Field wut = gevrey::apply_gevrey(ut, t, p_, +1).field;
  const Field wvt = gevrey::apply_gevrey(e * vt, t, p_, +1).field;
  const Field dxu = e * dx(wu), dxv = e * dx(wv);
  const Field dyu = dy(wu), dyv = dy(wv);
  const paley::DyadicBank& b = *bank_;

  const Field* all[] = {&wu, &wv, &dxu, &dxv, &dyu, &dyv, &wut, &wvt};
  const Field* pair[] = {&wu, &wv};
  const Field* diss[] = {&dxu, &dxv, &dyu, &dyv, &wut, &wvt};
  const auto sq_all = b.block_norms_sq(all);
  const auto sq_pair = b.block_norms_sq(pair);
  const auto sq_diss = b.block_norms_sq(diss);
  series_[0].update(sq_all, t, 1.0);
  series_[1].update(sq_pair, t, 1.0);
  series_[2].update(sq_pair, t, 1.0);
  series_[3].update(sq_diss, t, 1.0);

  const double ak = p_.a * p_.kappa();
  E1Sample& r = last_;
  r.t = t;
  r.terms = {series_[0].linf_norm(0.5), std::sqrt(ak) * series_[1].linf_norm(0.75),
             ak * series_[2].linf_norm(1.0), series_[3].l2_norm(0.5)};
  r.composite = r.terms[0] + r.terms[1] + r.terms[2] + r.terms[3];
  return r;
}

std::vector<EsSample> energy_E_s(const paley::DyadicBank& bank,
                                 const std::vector<double>& times,
                                 const std::vector<Field>& u,
                                 const std::vector<Field>& ut, double s,
                                 const gevrey::GevreyParams& p) {
  if (u.size() != times.size() || ut.size() != times.size())
    throw std::invalid_argument("energy_E_s: sample count mismatch");
  EsTracker tr(bank, s, p);
  std::vector<EsSample> out;
  for (std::size_t i = 0; i < times.size(); ++i) out.push_back(tr.add(u[i], ut[i], times[i]));
  return out;
}

std::vector<E1Sample> energy_E1(const paley::DyadicBank& bank,
                                const std::vector<double>& times,
                                const std::vector<Field>& u,
                                const std::vector<Field>& v,
                                const std::vector<Field>& ut,
                                const std::vector<Field>& vt, double eps,
                                const gevrey::GevreyParams& p, double rate_scale) {
  const std::size_t n = times.size();
  if (u.size() != n || v.size() != n || ut.size() != n || vt.size() != n)
    throw std::invalid_argument("energy_E1: sample count mismatch");
  E1Tracker tr(bank, eps, p, rate_scale);
  std::vector<E1Sample> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(tr.add(u[i], v[i], ut[i], vt[i], times[i]));
  return out;
}

DecayFit decay_fit(const std::vector<std::pair<double, double>>& series,
                   double t0, double t1) {
  DecayFit fit;
  std::vector<double> ts, ls;
  for (const auto& [t, v] : series) {
    if (t < t0 || t > t1) continue;
    if (!(v > 0.0) || !std::isfinite(v)) {
      ++fit.trimmed;
      continue;
    }
    ts.push_back(t);
    ls.push_back(std::log(v));
  }
  fit.used = static_cast<int>(ts.size());
  if (fit.trimmed > 0)
    fit.warning = "decay_fit: dropped " + std::to_string(fit.trimmed) +
                  " nonpositive value(s) from the window";
  if (fit.used < 2)
    throw std::invalid_argument("decay_fit: fewer than two positive samples in [" +
                                std::to_string(t0) + ", " + std::to_string(t1) + "]");
  const double n = fit.used;
  double mt = 0.0, ml = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    mt += ts[i];
    ml += ls[i];
  }
  mt /= n;
  ml /= n;
  double stt = 0.0, stl = 0.0, sll = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    stl += (ts[i] - mt) * (ls[i] - ml);
    sll += (ls[i] - ml) * (ls[i] - ml);
  }
  if (stt == 0.0) throw std::invalid_argument("decay_fit: all samples share one time");
  fit.rate = stl / stt;
  fit.intercept = ml - fit.rate * mt;
  double ssr = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    const double e = ls[i] - (fit.intercept + fit.rate * ts[i]);
    ssr += e * e;
  }
  fit.r2 = sll > 0.0 ? 1.0 - ssr / sll : 1.0;
  return fit;
}

}  // namespace gevflow::diagnostics
