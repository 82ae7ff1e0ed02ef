#pragma once

#include <vector>

#include "dynsync/graph_sequence.hpp"

namespace dynsync {

// Dense problems above this many unknowns n(T+1) are refused.
inline constexpr int kDenseDiagnosticsCap = 256;

struct FiedlerValue {
  double value = 0.0;  // 0 when the step is disconnected
  bool connected = false;
};

// Second-smallest eigenvalue of L_k.
FiedlerValue fiedler_value(const GraphSequence& g, int k);

struct LaplacianExtremes {
  double lambda_min = 0.0;  // min_k fiedler(L_k)
  double norm = 0.0;        // max_k largest eigenvalue of L_k
  bool all_connected = false;
};

LaplacianExtremes laplacian_extremes(const GraphSequence& g);
double lambda_min_L(const GraphSequence& g);
double norm_L(const GraphSequence& g);

// Dense n(T+1) x n(T+1) matrices, column-major.
std::vector<double> dense_laplacian(const GraphSequence& g);
std::vector<double> dense_smoothness_gram(int n, int horizon);

struct RankCheck {
  int rank = 0;
  int expected_rank = 0;
  double max_block_mean_residual = 0.0;  // max_k ||L(lambda) (e_k kron 1)||
  bool pass = false;
};

// Rank of L + lambda E^T E against n(T+1) - (T+1), plus annihilation of every
// e_k kron 1_n.
RankCheck nullspace_rank_check(const GraphSequence& g, double lambda);

// Smallest eigenvalue of (1/kappa)(L^2 + lambda^2 (E^T E)^2) + lambda (E^T E L + L E^T E).
double assumption3_margin(const GraphSequence& g, double lambda, double kappa);

}  // namespace dynsync
