#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynsync/graph_sequence.hpp"
#include "dynsync/rng.hpp"
#include "dynsync/spectral.hpp"

namespace dynsync {

// Edge probability p(k) of the Erdos-Renyi draw at step k.
struct EdgeProbability {
  enum class Kind { Constant, UniformRange, Schedule };

  Kind kind = Kind::Constant;
  double lo = 0.5;  // Constant uses lo
  double hi = 0.5;
  std::vector<double> schedule;  // one entry per step

  static EdgeProbability constant(double p) { return {Kind::Constant, p, p, {}}; }
  // p(k) drawn uniformly from [lo, hi] independently per step.
  static EdgeProbability uniform_range(double lo, double hi) { return {Kind::UniformRange, lo, hi, {}}; }
  static EdgeProbability per_step(std::vector<double> values) {
    return {Kind::Schedule, 0.0, 0.0, std::move(values)};
  }

  void validate(int horizon) const;
  std::string describe() const;
};

enum class ObservationModel { TranSync, Btl };

struct SynthConfig {
  int n = 10;
  int horizon = 10;
  double smoothness = 1.0;  // S_T
  double noise_sigma = 1.0;
  EdgeProbability edge_probability = EdgeProbability::constant(0.5);
  std::uint64_t seed = 0;
  ObservationModel model = ObservationModel::TranSync;
  int btl_trials = 1;  // L, BTL mode only
  // Also enforce connectivity of every individual step (resample, then repair).
  bool require_step_connectivity = false;

  void validate() const;
};

// eps = min(S_T, (pi S_T / ((T+1) sqrt(n-1)))^{2/3}).
double generation_threshold(int n, int horizon, double smoothness);

// z* = center(P_{V_eps} z / ||z||) with z ~ N(0, I). Guarantees ||E z*||^2 <= S_T.
StrengthTrajectory generate_ground_truth(const SynthConfig& cfg, const LowFrequencyProjector& projector);
StrengthTrajectory generate_ground_truth(const SynthConfig& cfg);

struct GraphGenerationStats {
  int resample_attempts = 1;   // full-sequence draws used
  int repair_edges = 0;        // edges inserted to restore connectivity
  bool all_steps_connected = false;
};

// Erdos-Renyi G(n, p(k)) per step with the union graph made connected: up to
// 100 full resamples, then a random spanning tree over the union's components
// with each tree edge placed at a uniformly random step.
GraphSequence generate_er_sequence(const SynthConfig& cfg, GraphGenerationStats* stats = nullptr);

// y_ij(k) = z_{k,i} - z_{k,j} + sigma * xi, xi ~ N(0, 1) i.i.d.
ObservationSet generate_observations(const StrengthTrajectory& truth, const GraphSequence& g, double sigma,
                                     std::uint64_t seed);

// ln((wins + 1/2) / (L - wins + 1/2)).
double btl_log_odds(int wins, int trials);

// wins_ij ~ Binomial(L, w_i / (w_i + w_j)); y_ij = btl_log_odds(wins_ij, L).
ObservationSet generate_btl_observations(const StrengthTrajectory& weights, const GraphSequence& g, int trials,
                                         std::uint64_t seed);

struct SyntheticInstance {
  StrengthTrajectory truth;  // block-centered z* (ln w* for BTL)
  GraphSequence graph;
  ObservationSet observations;
  GraphGenerationStats stats;
};

SyntheticInstance generate_instance(const SynthConfig& cfg, const LowFrequencyProjector& projector);
SyntheticInstance generate_instance(const SynthConfig& cfg);

}  // namespace dynsync
