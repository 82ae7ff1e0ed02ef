#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace dynsync {

struct LsqrResult {
  std::vector<double> x;
  int iterations = 0;
  double residual_norm = 0.0;         // ||b - A x||
  double normal_residual_norm = 0.0;  // ||A^T (b - A x)||
  double relative_residual = 0.0;     // stopping statistic that fired (or the smaller one)
  bool converged = false;
};

namespace detail {

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline void scale(std::span<double> v, double a) {
  for (double& x : v) x *= a;
}

}  // namespace detail

// Matrix-free LSQR (Paige & Saunders bidiagonalization) started from x = 0,
// so it converges to the minimum-norm least-squares solution.
//
//   apply(x, y):   y = A x     (x has `cols` entries, y has `rows`)
//   adjoint(y, x): x = A^T y
//
// Stops when ||r|| <= tol (||b|| + ||A|| ||x||) (compatible system) or
// ||A^T r|| <= tol ||A|| ||r|| (least-squares optimality).
template <class Apply, class Adjoint>
LsqrResult lsqr(std::size_t rows, std::size_t cols, Apply&& apply, Adjoint&& adjoint,
                std::span<const double> b, double tol, int max_iterations) {
  using detail::norm2;
  using detail::scale;

  LsqrResult out;
  out.x.assign(cols, 0.0);

  std::vector<double> u(b.begin(), b.end());
  std::vector<double> v(cols, 0.0);
  std::vector<double> w(cols, 0.0);
  std::vector<double> tmp_rows(rows, 0.0);
  std::vector<double> tmp_cols(cols, 0.0);

  double beta = norm2(u);
  const double bnorm = beta;
  if (beta > 0.0) scale(u, 1.0 / beta);
  double alpha = 0.0;
  if (beta > 0.0) {
    adjoint(std::span<const double>(u), std::span<double>(v));
    alpha = norm2(v);
  }
  if (alpha > 0.0) scale(v, 1.0 / alpha);
  w = v;

  double phibar = beta;
  double rhobar = alpha;
  double anorm_sq = 0.0;
  double rnorm = beta;
  double arnorm = alpha * beta;

  out.residual_norm = rnorm;
  out.normal_residual_norm = arnorm;
  if (arnorm == 0.0) {
    out.converged = true;
    return out;
  }

  for (int itn = 1; itn <= max_iterations; ++itn) {
    // u = A v - alpha u
    apply(std::span<const double>(v), std::span<double>(tmp_rows));
    for (std::size_t i = 0; i < rows; ++i) u[i] = tmp_rows[i] - alpha * u[i];
    beta = norm2(u);
    anorm_sq += alpha * alpha + beta * beta;
    if (beta > 0.0) {
      scale(u, 1.0 / beta);
      adjoint(std::span<const double>(u), std::span<double>(tmp_cols));
      for (std::size_t i = 0; i < cols; ++i) v[i] = tmp_cols[i] - beta * v[i];
      alpha = norm2(v);
      if (alpha > 0.0) scale(v, 1.0 / alpha);
    }

    const double rho = std::hypot(rhobar, beta);
    const double cs = rhobar / rho;
    const double sn = beta / rho;
    const double theta = sn * alpha;
    rhobar = -cs * alpha;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    for (std::size_t i = 0; i < cols; ++i) {
      out.x[i] += t1 * w[i];
      w[i] = v[i] + t2 * w[i];
    }

    rnorm = phibar;
    arnorm = alpha * std::abs(sn * phi);
    const double anorm = std::sqrt(anorm_sq);
    const double xnorm = norm2(out.x);

    out.iterations = itn;
    out.residual_norm = rnorm;
    out.normal_residual_norm = arnorm;

    const double test1 = rnorm / (bnorm + anorm * xnorm);
    const double test2 = rnorm > 0.0 ? arnorm / (anorm * rnorm) : 0.0;
    out.relative_residual = std::min(test1, test2);
    if (test1 <= tol || test2 <= tol || alpha == 0.0) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace dynsync
