#include "dynsync/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dynsync {

PathSpectrum path_eigenpairs(int horizon) {
  if (horizon < 1) throw InvalidArgument("path_eigenpairs: T must be >= 1, got " + std::to_string(horizon));
  const int size = horizon + 1;
  PathSpectrum out;
  out.horizon = horizon;
  out.eigenvalues.resize(size);
  out.eigenvectors.resize(static_cast<std::size_t>(size) * size);
  const double pi = std::numbers::pi;
  for (int k = 0; k < size; ++k) {
    const int freq = horizon - k;
    const double s = std::sin(freq * pi / (2.0 * size));
    out.eigenvalues[k] = freq == 0 ? 0.0 : 4.0 * s * s;
    const double norm = freq == 0 ? std::sqrt(1.0 / size) : std::sqrt(2.0 / size);
    double* row = out.eigenvectors.data() + static_cast<std::size_t>(k) * size;
    for (int i = 0; i < size; ++i) row[i] = norm * std::cos((i + 0.5) * freq * pi / size);
  }
  return out;
}

std::vector<double> centered_basis(int n) {
  if (n < 2) throw InvalidArgument("centered_basis: n must be >= 2, got " + std::to_string(n));
  std::vector<double> out(static_cast<std::size_t>(n - 1) * n, 0.0);
  for (int j = 1; j < n; ++j) {
    double* row = out.data() + static_cast<std::size_t>(j - 1) * n;
    const double denom = std::sqrt(static_cast<double>(j) * (j + 1));
    for (int i = 0; i < j; ++i) row[i] = 1.0 / denom;
    row[j] = -j / denom;
  }
  return out;
}

SpectralBasis::SpectralBasis(int n_items, int horizon_T)
    : n(n_items), horizon(horizon_T), path(path_eigenpairs(horizon_T)), centered(centered_basis(n_items)) {}

FrequencyIndexSet low_frequency_indices(const PathSpectrum& path, int n, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("low_frequency_indices: tau must be > 0");
  FrequencyIndexSet out;
  out.tau = tau;
  const double lambda = complete_graph_eigenvalue(n);
  for (int k = 0; k < path.size(); ++k) {
    if (k == path.horizon || lambda * path.eigenvalue(k) < tau) out.kept_time_indices.push_back(k);
  }
  return out;
}

LowFrequencyProjector::LowFrequencyProjector(int n, int horizon) : basis_(n, horizon) {}

void LowFrequencyProjector::check(const StrengthTrajectory& z, double tau) const {
  if (!(tau > 0.0)) throw InvalidArgument("project_low_frequency: tau must be > 0");
  if (z.n() != basis_.n || z.horizon() != basis_.horizon) {
    throw DimensionError("project_low_frequency: trajectory shape does not match basis");
  }
}

StrengthTrajectory LowFrequencyProjector::project(const StrengthTrajectory& z, double tau) const {
  check(z, tau);
  const int n = basis_.n;
  const int steps = basis_.horizon + 1;
  const auto kept = low_frequency_indices(basis_.path, n, tau).kept_time_indices;

  std::vector<double> means(steps);
  for (int t = 0; t < steps; ++t) {
    double m = 0.0;
    for (double v : z.block(t)) m += v;
    means[t] = m / n;
  }

  StrengthTrajectory out(n, basis_.horizon);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < steps; ++t) out(t, i) = means[t];
    for (int k : kept) {
      const auto u = basis_.path.eigenvector(k);
      double coef = 0.0;
      for (int t = 0; t < steps; ++t) coef += u[t] * (z(t, i) - means[t]);
      for (int t = 0; t < steps; ++t) out(t, i) += coef * u[t];
    }
  }
  return out;
}

StrengthTrajectory LowFrequencyProjector::project_reference(const StrengthTrajectory& z, double tau) const {
  check(z, tau);
  const int n = basis_.n;
  const int steps = basis_.horizon + 1;
  const double lambda = complete_graph_eigenvalue(n);

  StrengthTrajectory out(n, basis_.horizon);
  for (int t = 0; t < steps; ++t) {
    double m = 0.0;
    for (double v : z.block(t)) m += v;
    m /= n;
    for (double& v : out.block(t)) v = m;
  }

  std::vector<double> series(steps);
  std::vector<double> spectrum(steps);
  for (int j = 0; j + 1 < n; ++j) {
    const auto a = basis_.centered_vector(j);
    for (int t = 0; t < steps; ++t) {
      const auto zt = z.block(t);
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += a[i] * zt[i];
      series[t] = c;
    }
    for (int k = 0; k < steps; ++k) {
      const auto u = basis_.path.eigenvector(k);
      double c = 0.0;
      for (int t = 0; t < steps; ++t) c += u[t] * series[t];
      const bool keep = k == basis_.horizon || lambda * basis_.path.eigenvalue(k) < tau;
      spectrum[k] = keep ? c : 0.0;
    }
    for (int t = 0; t < steps; ++t) {
      double c = 0.0;
      for (int k = 0; k < steps; ++k) c += spectrum[k] * basis_.path.eigenvector(k)[t];
      auto ot = out.block(t);
      for (int i = 0; i < n; ++i) ot[i] += c * a[i];
    }
  }
  return out;
}

StrengthTrajectory project_low_frequency(const StrengthTrajectory& z, double tau) {
  return LowFrequencyProjector(z.n(), z.horizon()).project(z, tau);
}

int low_frequency_count_bound(int horizon, int n, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("low_frequency_count_bound: eps must be > 0");
  const double bound = horizon + n + std::sqrt((n - 1) * eps) * (horizon + 1) / std::numbers::pi;
  return static_cast<int>(std::ceil(bound));
}

}  // namespace dynsync
