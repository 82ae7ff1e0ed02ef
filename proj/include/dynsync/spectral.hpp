#pragma once

#include <span>
#include <vector>

#include "dynsync/graph_sequence.hpp"

namespace dynsync {

// Closed-form spectrum of the path Laplacian M M^T on T+1 vertices.
// Index k = 0..T is ordered by descending eigenvalue; mu_T = 0 and u_T is
// the normalized constant vector.
struct PathSpectrum {
  int horizon = 0;
  std::vector<double> eigenvalues;   // T+1 entries
  std::vector<double> eigenvectors;  // row k holds u_k, (T+1) x (T+1) row-major

  int size() const noexcept { return horizon + 1; }
  double eigenvalue(int k) const { return eigenvalues[k]; }
  std::span<const double> eigenvector(int k) const {
    return std::span<const double>(eigenvectors).subspan(static_cast<std::size_t>(k) * size(), size());
  }
};

// mu_k = 4 sin^2((T-k) pi / (2(T+1))), u_k(i) proportional to cos((i + 1/2)(T-k) pi / (T+1)).
PathSpectrum path_eigenpairs(int horizon);

// Helmert basis a_1..a_{n-1} of the complement of span(1_n), stored as
// (n-1) x n row-major. Row j-1 has j leading entries 1/sqrt(j(j+1)) and
// -j/sqrt(j(j+1)) at position j.
std::vector<double> centered_basis(int n);

// Nonzero eigenvalue of C C^T = nI - 11^T on the complement of 1_n.
constexpr double complete_graph_eigenvalue(int n) { return static_cast<double>(n); }

struct SpectralBasis {
  int n = 0;
  int horizon = 0;
  PathSpectrum path;
  std::vector<double> centered;  // see centered_basis

  SpectralBasis() = default;
  SpectralBasis(int n, int horizon);

  std::span<const double> centered_vector(int j) const {
    return std::span<const double>(centered).subspan(static_cast<std::size_t>(j) * n, n);
  }
};

// Time frequencies whose centered eigenvalue n * mu_k lies strictly below tau.
// k = T is always kept.
struct FrequencyIndexSet {
  double tau = 0.0;
  std::vector<int> kept_time_indices;  // ascending

  // dim V_tau: (n-1) centered directions per kept frequency plus the T+1
  // block-mean directions, which sit in the null space of E^T E.
  int dimension(int n, int horizon) const {
    return (n - 1) * static_cast<int>(kept_time_indices.size()) + horizon + 1;
  }
};

FrequencyIndexSet low_frequency_indices(const PathSpectrum& path, int n, double tau);

// Orthogonal projection onto V_tau, the span of E^T E eigenvectors with
// eigenvalue < tau. Block means are passed through unchanged.
class LowFrequencyProjector {
 public:
  LowFrequencyProjector(int n, int horizon);

  const SpectralBasis& basis() const noexcept { return basis_; }

  // OpenMP over items; only kept frequencies are transformed.
  StrengthTrajectory project(const StrengthTrajectory& z, double tau) const;

  // Serial reference: full path-basis transform of every Helmert coordinate
  // series, then truncation. Kept for testing the parallel kernel.
  StrengthTrajectory project_reference(const StrengthTrajectory& z, double tau) const;

 private:
  void check(const StrengthTrajectory& z, double tau) const;

  SpectralBasis basis_;
};

StrengthTrajectory project_low_frequency(const StrengthTrajectory& z, double tau);

// ceil(T + n + sqrt((n-1) eps) (T+1) / pi): upper bound on |L_eps| used when
// sizing synthetic ground truth.
int low_frequency_count_bound(int horizon, int n, double eps);

}  // namespace dynsync
