#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynsync/estimators.hpp"
#include "dynsync/synth.hpp"

namespace dynsync {

enum class EstimatorKind { NaiveLs, Dls, Dproj };

EstimatorKind parse_estimator_kind(std::string_view name);
std::string_view to_string(EstimatorKind kind);

// Either a fixed lambda/tau or the rate-optimal rule evaluated at (T, S_T).
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Dls;
  std::optional<double> fixed_parameter;
  LambdaRegime regime = LambdaRegime::Evolving;

  double parameter(int horizon, double smoothness) const;
  std::string label() const;
};

EstimateReport run_estimator(const EstimatorSpec& spec, const ObservationSet& obs, double parameter,
                             const SolverConfig& solver);

// S_T = scale * T^exponent.
struct SmoothnessRule {
  double scale = 1.0;
  double exponent = 0.0;

  double at(int horizon) const;
  std::string describe() const;
};

struct RateExperimentConfig {
  // n, sigma, edge probability, model, BTL trials and step connectivity come
  // from here; `seed` is the master seed; horizon and smoothness are
  // overridden per grid point.
  SynthConfig base;
  std::vector<int> horizons;
  SmoothnessRule smoothness;
  int trials = 1;
  std::vector<EstimatorSpec> estimators;
  SolverConfig solver;
  int threads = 1;

  void validate() const;
};

struct TrialOutcome {
  std::vector<double> mse;     // one per estimator; NaN when the estimator failed
  std::vector<std::string> errors;
  bool disconnected_step = false;
};

// Trial `trial` at horizon T. Depends only on (master seed, T, trial).
TrialOutcome run_trial(const RateExperimentConfig& cfg, int horizon, int trial);

struct ResultRow {
  int horizon = 0;
  std::string estimator;
  double parameter = 0.0;
  double mean_mse = 0.0;
  double std_mse = 0.0;
  int trials = 0;    // successful trials
  int failures = 0;
  int disconnected_step_trials = 0;
};

struct ResultTable {
  int n = 0;
  std::string smoothness;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string edge_probability;
  std::string model;
  std::vector<ResultRow> rows;

  // Mean MSE column for one estimator label, in horizon order.
  std::vector<double> mean_mse(std::string_view estimator) const;
  std::vector<double> horizons(std::string_view estimator) const;
};

// Monte Carlo error-rate experiment, trials spread over `threads` OpenMP
// threads. Aggregation is serial in (T, trial) order, so the table does not
// depend on the thread count.
ResultTable rate_experiment(const RateExperimentConfig& cfg);

}  // namespace dynsync
