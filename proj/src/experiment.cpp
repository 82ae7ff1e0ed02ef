#include "dynsync/experiment.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dynsync/metrics.hpp"

namespace dynsync {

EstimatorKind parse_estimator_kind(std::string_view name) {
  if (name == "ls" || name == "naive" || name == "naive_ls") return EstimatorKind::NaiveLs;
  if (name == "dls") return EstimatorKind::Dls;
  if (name == "dproj") return EstimatorKind::Dproj;
  throw InvalidArgument("unknown estimator '" + std::string(name) + "' (expected ls, dls, dproj)");
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::NaiveLs: return "ls";
    case EstimatorKind::Dls: return "dls";
    case EstimatorKind::Dproj: return "dproj";
  }
  return "ls";
}

double EstimatorSpec::parameter(int horizon, double smoothness) const {
  if (fixed_parameter) return *fixed_parameter;
  switch (kind) {
    case EstimatorKind::NaiveLs: return 0.0;
    case EstimatorKind::Dls: return choose_lambda(horizon, smoothness, regime);
    case EstimatorKind::Dproj: return choose_tau(horizon, smoothness);
  }
  return 0.0;
}

std::string EstimatorSpec::label() const { return std::string(to_string(kind)); }

EstimateReport run_estimator(const EstimatorSpec& spec, const ObservationSet& obs, double parameter,
                             const SolverConfig& solver) {
  switch (spec.kind) {
    case EstimatorKind::NaiveLs: return naive_ls(obs, solver);
    case EstimatorKind::Dls: return dls(obs, parameter, solver);
    case EstimatorKind::Dproj: return dproj(obs, parameter, solver);
  }
  return naive_ls(obs, solver);
}

double SmoothnessRule::at(int horizon) const { return scale * std::pow(static_cast<double>(horizon), exponent); }

std::string SmoothnessRule::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << scale << "*T^" << exponent;
  return os.str();
}

void RateExperimentConfig::validate() const {
  if (horizons.empty()) throw InvalidArgument("rate_experiment: horizon grid is empty");
  for (int t : horizons) {
    if (t < 1) throw InvalidArgument("rate_experiment: every T must be >= 1");
  }
  if (trials < 1) throw InvalidArgument("rate_experiment: trials must be >= 1");
  if (estimators.empty()) throw InvalidArgument("rate_experiment: no estimators requested");
  if (threads < 1) throw InvalidArgument("rate_experiment: threads must be >= 1");
  if (!(smoothness.scale > 0.0)) throw InvalidArgument("rate_experiment: smoothness scale must be > 0");
  solver.validate();
  SynthConfig probe = base;
  probe.horizon = horizons.front();
  probe.smoothness = smoothness.at(horizons.front());
  probe.validate();
}

namespace {

TrialOutcome run_trial_with(const RateExperimentConfig& cfg, int horizon, int trial,
                            const LowFrequencyProjector& projector) {
  SynthConfig synth = cfg.base;
  synth.horizon = horizon;
  synth.smoothness = cfg.smoothness.at(horizon);
  synth.seed = derive_seed(cfg.base.seed, {stream::kTrial, static_cast<std::uint64_t>(horizon),
                                           static_cast<std::uint64_t>(trial)});
  const auto instance = generate_instance(synth, projector);

  TrialOutcome out;
  out.disconnected_step = !instance.stats.all_steps_connected;
  for (const auto& spec : cfg.estimators) {
    try {
      const auto report =
          run_estimator(spec, instance.observations, spec.parameter(horizon, synth.smoothness), cfg.solver);
      out.mse.push_back(trajectory_mse(report.trajectory, instance.truth));
      out.errors.emplace_back();
    } catch (const std::exception& e) {
      out.mse.push_back(std::numeric_limits<double>::quiet_NaN());
      out.errors.emplace_back(e.what());
    }
  }
  return out;
}

}  // namespace

TrialOutcome run_trial(const RateExperimentConfig& cfg, int horizon, int trial) {
  return run_trial_with(cfg, horizon, trial, LowFrequencyProjector(cfg.base.n, horizon));
}

std::vector<double> ResultTable::mean_mse(std::string_view estimator) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.estimator == estimator) out.push_back(r.mean_mse);
  }
  return out;
}

std::vector<double> ResultTable::horizons(std::string_view estimator) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.estimator == estimator) out.push_back(r.horizon);
  }
  return out;
}

ResultTable rate_experiment(const RateExperimentConfig& cfg) {
  cfg.validate();
  const int grid = static_cast<int>(cfg.horizons.size());
  const int trials = cfg.trials;

  std::vector<LowFrequencyProjector> projectors;
  projectors.reserve(grid);
  for (int t : cfg.horizons) projectors.emplace_back(cfg.base.n, t);

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(grid) * trials);
  const int jobs = grid * trials;
#pragma omp parallel for schedule(dynamic) num_threads(cfg.threads)
  for (int job = 0; job < jobs; ++job) {
    const int g = job / trials;
    const int trial = job % trials;
    try {
      outcomes[job] = run_trial_with(cfg, cfg.horizons[g], trial, projectors[g]);
    } catch (const std::exception& e) {
      TrialOutcome failed;
      failed.mse.assign(cfg.estimators.size(), std::numeric_limits<double>::quiet_NaN());
      failed.errors.assign(cfg.estimators.size(), e.what());
      outcomes[job] = std::move(failed);
    }
  }

  ResultTable table;
  table.n = cfg.base.n;
  table.smoothness = cfg.smoothness.describe();
  table.sigma = cfg.base.noise_sigma;
  table.seed = cfg.base.seed;
  table.edge_probability = cfg.base.edge_probability.describe();
  table.model = cfg.base.model == ObservationModel::Btl ? "btl" : "transync";

  for (int g = 0; g < grid; ++g) {
    const int horizon = cfg.horizons[g];
    for (std::size_t s = 0; s < cfg.estimators.size(); ++s) {
      const auto& spec = cfg.estimators[s];
      ResultRow row;
      row.horizon = horizon;
      row.estimator = spec.label();
      row.parameter = spec.parameter(horizon, cfg.smoothness.at(horizon));
      double sum = 0.0;
      std::vector<double> values;
      for (int trial = 0; trial < trials; ++trial) {
        const auto& o = outcomes[static_cast<std::size_t>(g) * trials + trial];
        if (o.disconnected_step) ++row.disconnected_step_trials;
        const double v = o.mse[s];
        if (std::isnan(v)) {
          ++row.failures;
          continue;
        }
        values.push_back(v);
        sum += v;
      }
      row.trials = static_cast<int>(values.size());
      if (row.trials > 0) {
        row.mean_mse = sum / row.trials;
        double ss = 0.0;
        for (double v : values) ss += (v - row.mean_mse) * (v - row.mean_mse);
        row.std_mse = row.trials > 1 ? std::sqrt(ss / (row.trials - 1)) : 0.0;
      } else {
        row.mean_mse = std::numeric_limits<double>::quiet_NaN();
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace dynsync
