#pragma once

#include <string_view>

#include "dynsync/graph_sequence.hpp"

namespace dynsync {

struct SolverConfig {
  double rel_tolerance = 1e-10;
  int max_iterations = 0;  // 0 selects 10 * n * (T+1)

  void validate() const;
  int iteration_cap(int n, int horizon) const;
};

struct EstimateReport {
  StrengthTrajectory trajectory;  // block-centered
  int iterations = 0;             // total LSQR iterations (summed over steps for naive_ls)
  double final_residual = 0.0;    // ||stacked residual||
  double parameter = 0.0;         // lambda for dls, tau for dproj, 0 for naive_ls
  bool all_steps_connected = true;
};

// Per-step minimum-norm least squares of Q_k^T z_k ~ y_k. Disconnected steps
// are allowed; steps are solved in parallel.
EstimateReport naive_ls(const ObservationSet& obs, const SolverConfig& cfg = {});

// argmin ||Q^T z - y||^2 + lambda ||E z||^2 over block-centered z, solved
// matrix-free as the stacked least-squares system [Q^T; sqrt(lambda) E~] z ~ [y; 0].
// Requires a connected union graph.
EstimateReport dls(const ObservationSet& obs, double lambda, const SolverConfig& cfg = {});

// Projection of naive_ls onto V_tau.
EstimateReport dproj(const ObservationSet& obs, double tau, const SolverConfig& cfg = {});

// ||Q^T z - y||^2 + lambda ||E z||^2.
double dls_objective(const ObservationSet& obs, const StrengthTrajectory& z, double lambda);

enum class LambdaRegime { FixedGraph, Evolving, EvolvingWithA3 };

LambdaRegime parse_lambda_regime(std::string_view name);
std::string_view to_string(LambdaRegime regime);

// (T/S_T)^{2/3} for FixedGraph and EvolvingWithA3, (T/S_T)^{2/5} for Evolving.
double choose_lambda(int horizon, double smoothness, LambdaRegime regime = LambdaRegime::Evolving);

// (S_T/T)^{2/3}.
double choose_tau(int horizon, double smoothness);

}  // namespace dynsync
