#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dynsync/experiment.hpp"
#include "dynsync/rng.hpp"

namespace dynsync {

enum class CvCriterion { Mse, Upsets };

CvCriterion parse_cv_criterion(std::string_view name);
std::string_view to_string(CvCriterion criterion);

struct CvConfig {
  EstimatorKind estimator = EstimatorKind::Dls;
  std::vector<double> grid;
  CvCriterion criterion = CvCriterion::Mse;
  int repeats = 10;
  std::uint64_t seed = 0;
  SolverConfig solver;

  void validate() const;
};

struct CvReport {
  EstimatorKind estimator = EstimatorKind::Dls;
  CvCriterion criterion = CvCriterion::Mse;
  std::vector<double> grid;
  std::vector<double> mean_error;      // per grid value; +inf if every fit failed
  std::vector<int> evaluated_repeats;  // per grid value
  std::size_t selected_index = 0;
  double selected = 0.0;
  int skipped_repeats = 0;
  std::vector<std::string> warnings;
};

// One held-out measurement per step that has any.
struct HoldoutSplit {
  ObservationSet training;
  std::vector<ObservationSet::Triple> test;
};

HoldoutSplit holdout_one_per_step(const ObservationSet& obs, Rng& rng);

// Prediction error of `est` on held-out triples, normalized by T+1.
double holdout_error(const std::vector<ObservationSet::Triple>& test, const StrengthTrajectory& est,
                     CvCriterion criterion);

// Repeated hold-out-one-edge-per-step cross validation over a parameter grid.
// Each repeat draws one split shared by all grid values. For DLS, splits that
// disconnect the union graph are redrawn (up to 20 times) and the repeat is
// skipped with a warning if none works. The selected value minimizes the mean
// error, ties going to the smaller parameter.
CvReport cross_validate(const ObservationSet& obs, const CvConfig& cfg);

}  // namespace dynsync
