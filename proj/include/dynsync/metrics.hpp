#pragma once

#include <cstddef>
#include <span>

#include "dynsync/graph_sequence.hpp"

namespace dynsync {

// (1/(T+1)) sum_k ||est_k - truth_k||^2 after centering both blocks.
double trajectory_mse(const StrengthTrajectory& est, const StrengthTrajectory& truth);

// (1/(T+1)) sum_{k, (i,j)} (y_ij(k) - (est_{k,i} - est_{k,j}))^2.
double pairwise_mse(const ObservationSet& obs, const StrengthTrajectory& est);

struct UpsetCount {
  std::size_t count = 0;
  std::size_t total = 0;
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(count) / total; }
};

// True when sign(observed) != sign(predicted). A zero prediction against a
// nonzero observation is an upset; zero against zero is not.
bool is_upset(double observed, double predicted);

UpsetCount upsets(const ObservationSet& obs, const StrengthTrajectory& est);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace dynsync
