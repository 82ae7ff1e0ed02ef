#include "dynsync/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dynsync {

namespace {

using Matrix = Eigen::MatrixXd;

Matrix step_laplacian(const GraphSequence& g, int k) {
  Matrix l = Matrix::Zero(g.n(), g.n());
  for (const auto& e : g.edges(k)) {
    l(e.i, e.i) += 1.0;
    l(e.j, e.j) += 1.0;
    l(e.i, e.j) -= 1.0;
    l(e.j, e.i) -= 1.0;
  }
  return l;
}

Eigen::VectorXd symmetric_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

void check_cap(int n, int horizon, const char* what) {
  const long long size = static_cast<long long>(n) * (horizon + 1);
  if (size > kDenseDiagnosticsCap) {
    throw UnsupportedSize(std::string(what) + ": n(T+1) = " + std::to_string(size) + " exceeds the dense cap of " +
                          std::to_string(kDenseDiagnosticsCap));
  }
}

Matrix as_matrix(const std::vector<double>& dense, int size) {
  return Eigen::Map<const Matrix>(dense.data(), size, size);
}

}  // namespace

FiedlerValue fiedler_value(const GraphSequence& g, int k) {
  FiedlerValue out;
  out.connected = is_connected(g, k);
  if (!out.connected) return out;
  out.value = symmetric_eigenvalues(step_laplacian(g, k))(1);
  return out;
}

LaplacianExtremes laplacian_extremes(const GraphSequence& g) {
  LaplacianExtremes out;
  out.all_connected = true;
  out.lambda_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < g.steps(); ++k) {
    const auto ev = symmetric_eigenvalues(step_laplacian(g, k));
    out.norm = std::max(out.norm, ev(ev.size() - 1));
    if (is_connected(g, k)) {
      out.lambda_min = std::min(out.lambda_min, ev(1));
    } else {
      out.all_connected = false;
      out.lambda_min = 0.0;
    }
  }
  return out;
}

double lambda_min_L(const GraphSequence& g) { return laplacian_extremes(g).lambda_min; }

double norm_L(const GraphSequence& g) { return laplacian_extremes(g).norm; }

std::vector<double> dense_laplacian(const GraphSequence& g) {
  check_cap(g.n(), g.horizon(), "dense_laplacian");
  const int n = g.n();
  const int size = n * g.steps();
  Matrix l = Matrix::Zero(size, size);
  for (int k = 0; k < g.steps(); ++k) l.block(k * n, k * n, n, n) = step_laplacian(g, k);
  return {l.data(), l.data() + l.size()};
}

std::vector<double> dense_smoothness_gram(int n, int horizon) {
  check_cap(n, horizon, "dense_smoothness_gram");
  const int steps = horizon + 1;
  Matrix path = Matrix::Zero(steps, steps);
  for (int k = 0; k < horizon; ++k) {
    path(k, k) += 1.0;
    path(k + 1, k + 1) += 1.0;
    path(k, k + 1) -= 1.0;
    path(k + 1, k) -= 1.0;
  }
  const Matrix complete = n * Matrix::Identity(n, n) - Matrix::Ones(n, n);
  Matrix gram = Matrix::Zero(n * steps, n * steps);
  for (int a = 0; a < steps; ++a) {
    for (int b = 0; b < steps; ++b) {
      if (path(a, b) != 0.0) gram.block(a * n, b * n, n, n) = path(a, b) * complete;
    }
  }
  return {gram.data(), gram.data() + gram.size()};
}

RankCheck nullspace_rank_check(const GraphSequence& g, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("nullspace_rank_check: lambda must be > 0");
  check_cap(g.n(), g.horizon(), "nullspace_rank_check");
  const int n = g.n();
  const int steps = g.steps();
  const int size = n * steps;
  const Matrix m = as_matrix(dense_laplacian(g), size) + lambda * as_matrix(dense_smoothness_gram(n, g.horizon()), size);

  const auto ev = symmetric_eigenvalues(m);
  const double norm = std::max(std::abs(ev(0)), std::abs(ev(size - 1)));
  const double cutoff = 1e-9 * norm;

  RankCheck out;
  out.rank = static_cast<int>((ev.array() > cutoff).count());
  out.expected_rank = size - steps;
  for (int k = 0; k < steps; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(size);
    v.segment(k * n, n).setOnes();
    out.max_block_mean_residual = std::max(out.max_block_mean_residual, (m * v).norm());
  }
  out.pass = out.rank == out.expected_rank && out.max_block_mean_residual <= 1e-10;
  return out;
}

double assumption3_margin(const GraphSequence& g, double lambda, double kappa) {
  if (!(lambda > 0.0)) throw InvalidArgument("assumption3_margin: lambda must be > 0");
  if (!(kappa > 0.0)) throw InvalidArgument("assumption3_margin: kappa must be > 0");
  check_cap(g.n(), g.horizon(), "assumption3_margin");
  const int size = g.n() * g.steps();
  const Matrix l = as_matrix(dense_laplacian(g), size);
  const Matrix e = as_matrix(dense_smoothness_gram(g.n(), g.horizon()), size);
  Matrix m = (l * l + lambda * lambda * (e * e)) / kappa + lambda * (e * l + l * e);
  m = 0.5 * (m + m.transpose());
  return symmetric_eigenvalues(m)(0);
}

}  // namespace dynsync
