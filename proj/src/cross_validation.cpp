#include "dynsync/cross_validation.hpp"

#include <cmath>
#include <limits>

#include "dynsync/metrics.hpp"

namespace dynsync {

namespace {

constexpr int kMaxRedraws = 20;

}  // namespace

CvCriterion parse_cv_criterion(std::string_view name) {
  if (name == "mse") return CvCriterion::Mse;
  if (name == "upsets") return CvCriterion::Upsets;
  throw InvalidArgument("unknown cv criterion '" + std::string(name) + "' (expected mse, upsets)");
}

std::string_view to_string(CvCriterion criterion) {
  return criterion == CvCriterion::Mse ? "mse" : "upsets";
}

void CvConfig::validate() const {
  if (grid.empty()) throw InvalidArgument("cross_validate: grid is empty");
  if (estimator == EstimatorKind::NaiveLs) throw InvalidArgument("cross_validate: estimator must be dls or dproj");
  for (double v : grid) {
    if (!(v > 0.0)) throw InvalidArgument("cross_validate: grid values must be > 0");
  }
  if (repeats < 1) throw InvalidArgument("cross_validate: repeats must be >= 1");
  solver.validate();
}

HoldoutSplit holdout_one_per_step(const ObservationSet& obs, Rng& rng) {
  const auto& g = obs.graph();
  std::vector<std::vector<Edge>> edges(g.steps());
  std::vector<double> values;
  values.reserve(g.total_edges());
  HoldoutSplit split;
  for (int k = 0; k < g.steps(); ++k) {
    const auto es = g.edges(k);
    const auto ys = obs.values(k);
    const std::size_t pick = es.empty() ? 0 : rng.uniform_index(es.size());
    for (std::size_t e = 0; e < es.size(); ++e) {
      if (e == pick) {
        split.test.push_back({k, es[e].i, es[e].j, ys[e]});
      } else {
        edges[k].push_back(es[e]);
        values.push_back(ys[e]);
      }
    }
  }
  split.training = ObservationSet(GraphSequence(g.n(), g.horizon(), std::move(edges)), std::move(values));
  return split;
}

double holdout_error(const std::vector<ObservationSet::Triple>& test, const StrengthTrajectory& est,
                     CvCriterion criterion) {
  double total = 0.0;
  for (const auto& t : test) {
    const double predicted = est(t.step, t.i) - est(t.step, t.j);
    if (criterion == CvCriterion::Mse) {
      total += (t.y - predicted) * (t.y - predicted);
    } else {
      total += is_upset(t.y, predicted) ? 1.0 : 0.0;
    }
  }
  return total / est.steps();
}

CvReport cross_validate(const ObservationSet& obs, const CvConfig& cfg) {
  cfg.validate();
  const auto& g = obs.graph();
  for (int k = 0; k < g.steps(); ++k) {
    if (g.edge_count(k) == 0) {
      throw PreconditionError("cross_validate: step " + std::to_string(k) + " has no observations");
    }
  }

  CvReport report;
  report.estimator = cfg.estimator;
  report.criterion = cfg.criterion;
  report.grid = cfg.grid;
  const std::size_t grid = cfg.grid.size();
  std::vector<double> sums(grid, 0.0);
  report.evaluated_repeats.assign(grid, 0);

  EstimatorSpec spec;
  spec.kind = cfg.estimator;

  for (int r = 0; r < cfg.repeats; ++r) {
    HoldoutSplit split;
    bool usable = false;
    for (int redraw = 0; redraw < kMaxRedraws && !usable; ++redraw) {
      Rng rng = Rng::derive(cfg.seed, {stream::kHoldout, static_cast<std::uint64_t>(r),
                                       static_cast<std::uint64_t>(redraw)});
      split = holdout_one_per_step(obs, rng);
      usable = cfg.estimator != EstimatorKind::Dls || union_is_connected(split.training.graph());
    }
    if (!usable) {
      ++report.skipped_repeats;
      report.warnings.push_back("repeat " + std::to_string(r) + " skipped: every hold-out draw disconnected the union graph");
      continue;
    }
    for (const auto& t : split.test) {
      if (split.training.graph().contains(t.step, {t.i, t.j})) {
        throw std::logic_error("cross_validate: held-out edge present in training set");
      }
    }
    for (std::size_t p = 0; p < grid; ++p) {
      try {
        const auto fit = run_estimator(spec, split.training, cfg.grid[p], cfg.solver);
        sums[p] += holdout_error(split.test, fit.trajectory, cfg.criterion);
        ++report.evaluated_repeats[p];
      } catch (const std::exception& e) {
        report.warnings.push_back("repeat " + std::to_string(r) + ", value " + std::to_string(cfg.grid[p]) +
                                  ": " + e.what());
      }
    }
  }

  report.mean_error.resize(grid);
  for (std::size_t p = 0; p < grid; ++p) {
    report.mean_error[p] = report.evaluated_repeats[p] > 0 ? sums[p] / report.evaluated_repeats[p]
                                                           : std::numeric_limits<double>::infinity();
  }
  std::size_t best = 0;
  for (std::size_t p = 1; p < grid; ++p) {
    const double a = report.mean_error[p];
    const double b = report.mean_error[best];
    if (a < b || (a == b && cfg.grid[p] < cfg.grid[best])) best = p;
  }
  report.selected_index = best;
  report.selected = cfg.grid[best];
  return report;
}

}  // namespace dynsync
