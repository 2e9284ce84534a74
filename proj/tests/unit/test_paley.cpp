#include <cmath>
#include <random>

#include "doctest.h"
#include "gevflow/paley.hpp"
#include "test_util.hpp"

using namespace gevflow;
using namespace gevflow::paley;

namespace {

// Independent transcription of the cutoff: chi = 1 - g(3(tau - 1)) with
// g(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}) on (0, 1).
double chi_ref(double tau) {
  const double t = 3.0 * (std::abs(tau) - 1.0);
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return 1.0 - a / (a + b);
}
double phi_ref(double tau) { return chi_ref(tau / 2.0) - chi_ref(tau); }

// Block norm straight from the definition, mode by mode.
double block_norm_ref(const Field& f, int k) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    const double w = (j == 0 || j == g.ny() - 1) ? 0.5 * g.dy() : g.dy();
    for (int m = -g.nx() / 2 + 1; m <= g.nx() / 2; ++m) {
      if (m == 0) continue;
      const double p = phi_ref(std::ldexp(std::abs(g.xi(m)), -k));
      s += w * g.lx() * p * p * std::norm(f.coeff(m, j));
    }
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("cutoff shape") {
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(4.0 / 3.0) == 0.0);
  CHECK(chi(2.0) == 0.0);
  for (double t = 0.0; t < 3.0; t += 0.01) {
    CHECK(chi(t) == doctest::Approx(chi_ref(t)).epsilon(1e-15));
    CHECK(chi(t + 0.01) <= chi(t) + 1e-15);
    CHECK(phi(t) >= 0.0);
    if (t <= 1.0 || t >= 8.0 / 3.0) CHECK(phi(t) == 0.0);
  }
}

TEST_CASE("partition of unity and block supports") {
  for (int nx : {16, 64, 128, 256}) {
    for (double lx : {2.0 * kPi, 1.0, 20.0}) {
      const DyadicBank bank(Grid(lx, nx, 9));
      CHECK(bank.partition_residual() <= 1e-12);
      CHECK(bank.low_frequency_residual() <= 1e-12);
      CHECK(bank.supports_ok());
      for (int j = bank.k_min(); j <= bank.k_max(); ++j)
        for (int k = j + 2; k <= bank.k_max(); ++k)
          for (int m = 0; m <= nx / 2; ++m)
            CHECK(bank.phi_samples(j)[m] * bank.phi_samples(k)[m] <= 1e-13);
    }
  }
}

TEST_CASE("fault injection breaks the partition") {
  BankOptions o;
  o.phi_perturbation = 1e-8;
  const DyadicBank bank(Grid(2.0 * kPi, 64, 9), o);
  CHECK(bank.partition_residual() > 1e-12);
}

TEST_CASE("block norms and Besov norm against the definition") {
  std::mt19937_64 rng(5);
  const Grid g(2.0 * kPi, 64, 17);
  const DyadicBank bank(g);
  const Field f = testing::random_field(g, rng, 31);
  const auto blocks = bank.block_norms(f);
  double besov = 0.0;
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
    double ref = block_norm_ref(f, k);
    if (k == bank.k_min()) {
      // The mean is folded into the lowest block.
      double m0 = 0.0;
      for (int j = 0; j < g.ny(); ++j) {
        const double w = (j == 0 || j == g.ny() - 1) ? 0.5 * g.dy() : g.dy();
        m0 += w * g.lx() * std::norm(f.at(0, j));
      }
      ref = std::sqrt(ref * ref + m0);
    }
    CHECK(blocks[k - bank.k_min()] == doctest::Approx(ref).epsilon(1e-12));
    besov += std::exp2(0.5 * k) * ref;
  }
  CHECK(besov_norm(bank, f, 0.5) == doctest::Approx(besov).epsilon(1e-12));
  // Sum of squared blocks recovers the L2 norm only up to phi^2 != phi; the
  // blocks themselves sum back to the field.
  Field sum(g);
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) sum += delta_k(bank, f, k);
  Field mean(g);
  for (int j = 0; j < g.ny(); ++j) mean.at(0, j) = f.at(0, j);
  CHECK(l2_norm(sum + mean - f) <= 1e-12 * l2_norm(f));
  CHECK(l2_norm(S_k(bank, f, bank.k_min() - 1) - mean) <= 1e-14 * l2_norm(f));
}

TEST_CASE("vector Besov norm combines components per block") {
  std::mt19937_64 rng(9);
  const Grid g(2.0 * kPi, 32, 9);
  const DyadicBank bank(g);
  const Field a = testing::random_field(g, rng, 10), b = testing::random_field(g, rng, 10);
  const Field* both[] = {&a, &b};
  const auto na = bank.block_norms(a), nb = bank.block_norms(b);
  double ref = 0.0;
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
    const int i = k - bank.k_min();
    ref += std::exp2(0.25 * k) * std::hypot(na[i], nb[i]);
  }
  CHECK(besov_norm(bank, both, 0.25) == doctest::Approx(ref).epsilon(1e-13));
  CHECK(besov_norm(bank, Field(g), 1.0) == 0.0);
}

TEST_CASE("Bony decomposition reconstructs the product") {
  std::mt19937_64 rng(21);
  const Grid g(2.0 * kPi, 128, 33);
  const DyadicBank bank(g);
  for (int trial = 0; trial < 5; ++trial) {
    const Field f = testing::random_field(g, rng, g.dealias_max());
    const Field h = testing::random_field(g, rng, g.dealias_max());
    const auto p = bony(bank, f, h);
    const Field fh = product(f, h);
    CHECK(l2_norm(p.T_fg + p.T_gf + p.R - fh) <= 1e-12 * l2_norm(fh));
  }
}

TEST_CASE("Bony parts for a constant factor") {
  std::mt19937_64 rng(4);
  const Grid g(2.0 * kPi, 64, 9);
  const DyadicBank bank(g);
  Field c(g);
  for (int j = 0; j < g.ny(); ++j) c.at(0, j) = 2.0;
  const Field h = testing::random_field(g, rng, 20);
  const auto p = bony(bank, c, h);
  Field hm(g);
  for (int j = 0; j < g.ny(); ++j) hm.at(0, j) = h.at(0, j);
  // T_c h = c (h - mean h), T_h c = 0, R = c mean h.
  CHECK(l2_norm(p.T_fg - 2.0 * (h - hm)) <= 1e-13 * l2_norm(h));
  CHECK(l2_norm(p.T_gf) <= 1e-14 * l2_norm(h));
  CHECK(l2_norm(p.R - 2.0 * hm) <= 1e-13 * l2_norm(h));
}

TEST_CASE("Bernstein ratios on localized blocks") {
  std::mt19937_64 rng(8);
  const Grid g(2.0 * kPi, 256, 9);
  const DyadicBank bank(g);
  const Field f = testing::random_field(g, rng, 127);
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
    const auto r = bernstein_check(delta_k(bank, f, k), k);
    if (r.skipped) continue;
    CHECK(r.within());
    CHECK(r.derivative_ratio >= 0.75);
    CHECK(r.derivative_ratio <= 8.0 / 3.0);
    // Cauchy-Schwarz over the modes of the ring.
    const double count = 2.0 * (8.0 / 3.0 - 0.75) * std::exp2(k) + 2.0;
    CHECK(r.sup_ratio <= std::sqrt(count / g.lx()) / std::exp2(0.5 * k));
  }
  CHECK(bernstein_check(Field(g), 2).skipped);
}

TEST_CASE("NormSeries accumulates by hand") {
  NormSeries s(-1, 2, TimeWeight::ThetaDot, 0.5);
  const double b0[] = {1.0, 4.0}, b1[] = {0.25, 9.0};
  s.update(b0, 0.0, 2.0);
  s.update(b1, 0.5, 3.0);
  const double g = std::exp(0.5 * 0.5);
  const double i0 = 0.25 * (2.0 * 1.0 + 3.0 * g * g * 0.25);
  const double i1 = 0.25 * (2.0 * 4.0 + 3.0 * g * g * 9.0);
  CHECK(s.integrals()[0] == doctest::Approx(i0));
  CHECK(s.integrals()[1] == doctest::Approx(i1));
  CHECK(s.maxima()[0] == doctest::Approx(1.0));
  CHECK(s.maxima()[1] == doctest::Approx(3.0 * g));
  CHECK(s.l2_norm(1.0) == doctest::Approx(0.5 * std::sqrt(i0) + std::sqrt(i1)));
  CHECK(s.linf_norm(0.0) == doctest::Approx(1.0 + 3.0 * g));
  CHECK(s.samples() == 2);
  CHECK_THROWS_AS(s.update(b0, 0.25, 1.0), std::invalid_argument);
  const double bad[] = {1.0};
  CHECK_THROWS_AS(s.update(bad, 1.0, 1.0), std::invalid_argument);
}
