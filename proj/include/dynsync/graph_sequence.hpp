#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dynsync/errors.hpp"

namespace dynsync {

// Undirected comparison pair stored with i < j. The incidence convention is
// +1 at i and -1 at j, so an edge observes z_i - z_j.
struct Edge {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Comparison graphs G_0..G_T on a fixed item set [0, n). Step k corresponds to
// time k / T.
class GraphSequence {
 public:
  GraphSequence() = default;

  // Edges may be given in either orientation; they are canonicalized to i < j
  // and sorted. Self-loops, duplicates and out-of-range endpoints throw.
  GraphSequence(int n, int horizon, std::vector<std::vector<Edge>> edges);

  int n() const noexcept { return n_; }
  int horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return horizon_ + 1; }

  std::span<const Edge> edges(int k) const;
  std::size_t edge_count(int k) const { return edges(k).size(); }
  std::size_t total_edges() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }

  // Position of step k's first edge in the stacked (step, edge) ordering.
  std::size_t edge_offset(int k) const;

  bool contains(int k, Edge e) const;

  friend bool operator==(const GraphSequence& a, const GraphSequence& b) {
    return a.n_ == b.n_ && a.horizon_ == b.horizon_ && a.edges_ == b.edges_;
  }

 private:
  void check_step(int k) const;

  int n_ = 0;
  int horizon_ = 0;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::size_t> offsets_;
};

// A trajectory z in R^{n(T+1)} stored as T+1 contiguous blocks of n.
class StrengthTrajectory {
 public:
  StrengthTrajectory() = default;
  StrengthTrajectory(int n, int horizon);
  StrengthTrajectory(int n, int horizon, std::vector<double> values);

  int n() const noexcept { return n_; }
  int horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return horizon_ + 1; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<double> block(int k);
  std::span<const double> block(int k) const;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator()(int k, int i) { return values_[static_cast<std::size_t>(k) * n_ + i]; }
  double operator()(int k, int i) const { return values_[static_cast<std::size_t>(k) * n_ + i]; }

  // Subtract each block's mean.
  void center_blocks();

  // Every block sums to zero within 1e-9 * n * max|entry| (or `tol` if given).
  bool is_block_centered(double tol = -1.0) const;

  friend bool operator==(const StrengthTrajectory&, const StrengthTrajectory&) = default;

 private:
  int n_ = 0;
  int horizon_ = 0;
  std::vector<double> values_;
};

// One real measurement per (step, canonical edge), stacked in graph order.
class ObservationSet {
 public:
  struct Triple {
    int step = 0;
    int i = 0;
    int j = 0;
    double y = 0.0;
  };

  ObservationSet() = default;
  ObservationSet(GraphSequence graph, std::vector<double> values);

  // Triples with i > j are flipped to (j, i, -y).
  static ObservationSet from_triples(int n, int horizon, std::vector<Triple> triples);

  const GraphSequence& graph() const noexcept { return graph_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> values(int k) const;

  std::vector<Triple> triples() const;

  friend bool operator==(const ObservationSet& a, const ObservationSet& b);

 private:
  GraphSequence graph_;
  std::vector<double> values_;
};

// Q_k^T z_k: entry e = (i, j) is z_i - z_j.
std::vector<double> incidence_apply(const GraphSequence& g, int k, std::span<const double> z_k);

// Q_k w: scatters +w_e to i and -w_e to j.
std::vector<double> incidence_adjoint(const GraphSequence& g, int k, std::span<const double> w_k);

// Stacked versions over all steps (Q^T z and Q w).
std::vector<double> incidence_apply(const GraphSequence& g, const StrengthTrajectory& z);
StrengthTrajectory incidence_adjoint(const GraphSequence& g, std::span<const double> w);

std::vector<double> laplacian_apply(const GraphSequence& g, int k, std::span<const double> z_k);

bool is_connected(const GraphSequence& g, int k);
bool union_is_connected(const GraphSequence& g);

// Reduced temporal-smoothness operator: block k of the output (k = 0..T-1) is
// sqrt(n) * center(z_k - z_{k+1}). Its Gram matrix equals (M M^T) kron (C C^T)
// where C is the complete-graph incidence, so ||smoothness_apply(z)||^2 is the
// quadratic variation sum_k ||C^T (z_k - z_{k+1})||^2.
std::vector<double> smoothness_apply(const StrengthTrajectory& z);
StrengthTrajectory smoothness_adjoint(int n, int horizon, std::span<const double> w);

// sum_k ||C^T (z_k - z_{k+1})||^2 computed as sum_k n||d_k||^2 - (1^T d_k)^2.
double smoothness_energy(const StrengthTrajectory& z);

}  // namespace dynsync
