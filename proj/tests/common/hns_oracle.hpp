#pragma once
// Dense single-mode model of the linear scaled system: constraint C (box
// divergence on faces), metric W = diag(1, eps^-2), operator K = dyy -
// eps^2 xi^2, projection P = I - W C* (C W C*)^-1 C, and the exact flow of
// x'' = P (K x - x') by matrix exponential.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "gevflow/field.hpp"

namespace gevflow::testing {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct ModeOps {
  int n = 0;  // interior rows
  CMat C, W, K;
};

inline ModeOps mode_ops(const Grid& g, int m, double eps) {
  const int n = g.ny() - 2, nf = g.ny() - 1;
  const double h = g.dy();
  const std::complex<double> ik(0.0, m == g.nx() / 2 ? 0.0 : g.xi(m));
  ModeOps o;
  o.n = n;
  o.C = CMat::Zero(nf, 2 * n);
  for (int f = 0; f < nf; ++f) {
    // face f sits between rows f and f + 1; interior row j is column j - 1
    for (int j : {f, f + 1}) {
      if (j < 1 || j > n) continue;
      o.C(f, j - 1) += 0.5 * ik;
      o.C(f, n + j - 1) += (j == f + 1 ? 1.0 : -1.0) / h;
    }
  }
  o.W = CMat::Identity(2 * n, 2 * n);
  for (int i = n; i < 2 * n; ++i) o.W(i, i) = 1.0 / (eps * eps);
  CMat L = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    L(i, i) = -2.0 / (h * h) - eps * eps * std::norm(ik);
    if (i > 0) L(i, i - 1) = 1.0 / (h * h);
    if (i + 1 < n) L(i, i + 1) = 1.0 / (h * h);
  }
  o.K = CMat::Zero(2 * n, 2 * n);
  o.K.topLeftCorner(n, n) = L;
  o.K.bottomRightCorner(n, n) = L;
  return o;
}

inline CVec pack(const Field& a, const Field& b, int m) {
  const int n = a.ny() - 2;
  CVec x(2 * n);
  for (int j = 1; j <= n; ++j) {
    x(j - 1) = a.at(m, j);
    x(n + j - 1) = b.at(m, j);
  }
  return x;
}

/// (x, x') at time t from x(0) = (u0, v0), x'(0) = 0 on mode m.
inline CVec linear_flow(const Grid& g, int m, double eps, const Field& u0, const Field& v0,
                        double t) {
  const auto o = mode_ops(g, m, eps);
  const int n2 = 2 * o.n;
  const CMat M = o.C * o.W * o.C.adjoint();
  const CMat P = CMat::Identity(n2, n2) - o.W * o.C.adjoint() * M.ldlt().solve(o.C);
  CMat A = CMat::Zero(2 * n2, 2 * n2);
  A.topRightCorner(n2, n2) = CMat::Identity(n2, n2);
  A.bottomLeftCorner(n2, n2) = P * o.K;
  A.bottomRightCorner(n2, n2) = -P;
  CVec y0(2 * n2);
  y0 << pack(u0, v0, m), CVec::Zero(n2);
  return (A * t).exp() * y0;
}

}  // namespace gevflow::testing
