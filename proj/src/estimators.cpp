#include "dynsync/estimators.hpp"

#include <cmath>
#include <string>

#include "dynsync/lsqr.hpp"
#include "dynsync/spectral.hpp"

namespace dynsync {

void SolverConfig::validate() const {
  if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0)) {
    throw InvalidArgument("SolverConfig: rel_tolerance must lie in (0, 1)");
  }
  if (max_iterations < 0) throw InvalidArgument("SolverConfig: max_iterations must be >= 1 (or 0 for default)");
}

int SolverConfig::iteration_cap(int n, int horizon) const {
  return max_iterations > 0 ? max_iterations : 10 * n * (horizon + 1);
}

namespace {

struct StepSolve {
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

StepSolve solve_step(const ObservationSet& obs, int k, const SolverConfig& cfg, std::span<double> out) {
  const auto& g = obs.graph();
  const auto edges = g.edges(k);
  const auto y = obs.values(k);
  if (edges.empty()) {
    std::fill(out.begin(), out.end(), 0.0);
    return {};
  }
  auto apply = [&](std::span<const double> z, std::span<double> r) {
    for (std::size_t e = 0; e < edges.size(); ++e) r[e] = z[edges[e].i] - z[edges[e].j];
  };
  auto adjoint = [&](std::span<const double> r, std::span<double> z) {
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      z[edges[e].i] += r[e];
      z[edges[e].j] -= r[e];
    }
  };
  auto res = lsqr(edges.size(), static_cast<std::size_t>(g.n()), apply, adjoint, y, cfg.rel_tolerance,
                  cfg.iteration_cap(g.n(), g.horizon()));
  std::copy(res.x.begin(), res.x.end(), out.begin());
  return {res.iterations, res.residual_norm, res.converged};
}

}  // namespace

EstimateReport naive_ls(const ObservationSet& obs, const SolverConfig& cfg) {
  cfg.validate();
  const auto& g = obs.graph();
  EstimateReport report;
  report.trajectory = StrengthTrajectory(g.n(), g.horizon());
  std::vector<StepSolve> solves(g.steps());
  std::vector<char> connected(g.steps());

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < g.steps(); ++k) {
    solves[k] = solve_step(obs, k, cfg, report.trajectory.block(k));
    connected[k] = is_connected(g, k);
  }

  double residual_sq = 0.0;
  for (int k = 0; k < g.steps(); ++k) {
    report.iterations += solves[k].iterations;
    residual_sq += solves[k].residual * solves[k].residual;
    report.all_steps_connected = report.all_steps_connected && connected[k];
  }
  report.final_residual = std::sqrt(residual_sq);
  for (int k = 0; k < g.steps(); ++k) {
    if (!solves[k].converged) {
      throw ConvergenceError("naive_ls: step " + std::to_string(k) + " did not converge within " +
                                 std::to_string(cfg.iteration_cap(g.n(), g.horizon())) + " iterations",
                             solves[k].residual, solves[k].iterations);
    }
  }
  report.trajectory.center_blocks();
  return report;
}

EstimateReport dls(const ObservationSet& obs, double lambda, const SolverConfig& cfg) {
  cfg.validate();
  if (!(lambda > 0.0)) throw InvalidArgument("dls: lambda must be > 0");
  const auto& g = obs.graph();
  if (!union_is_connected(g)) throw PreconditionError("dls: union of comparison graphs is not connected");

  const int n = g.n();
  const int horizon = g.horizon();
  const std::size_t m = g.total_edges();
  const std::size_t smooth_rows = static_cast<std::size_t>(horizon) * n;
  const std::size_t cols = static_cast<std::size_t>(n) * (horizon + 1);
  const double weight = std::sqrt(lambda) * std::sqrt(static_cast<double>(n));

  auto apply = [&](std::span<const double> z, std::span<double> r) {
    for (int k = 0; k < g.steps(); ++k) {
      const auto edges = g.edges(k);
      const double* zk = z.data() + static_cast<std::size_t>(k) * n;
      double* rk = r.data() + g.edge_offset(k);
      for (std::size_t e = 0; e < edges.size(); ++e) rk[e] = zk[edges[e].i] - zk[edges[e].j];
    }
    for (int k = 0; k < horizon; ++k) {
      const double* a = z.data() + static_cast<std::size_t>(k) * n;
      const double* b = a + n;
      double* rk = r.data() + m + static_cast<std::size_t>(k) * n;
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += a[i] - b[i];
      mean /= n;
      for (int i = 0; i < n; ++i) rk[i] = weight * (a[i] - b[i] - mean);
    }
  };
  auto adjoint = [&](std::span<const double> r, std::span<double> z) {
    std::fill(z.begin(), z.end(), 0.0);
    for (int k = 0; k < g.steps(); ++k) {
      const auto edges = g.edges(k);
      double* zk = z.data() + static_cast<std::size_t>(k) * n;
      const double* rk = r.data() + g.edge_offset(k);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        zk[edges[e].i] += rk[e];
        zk[edges[e].j] -= rk[e];
      }
    }
    for (int k = 0; k < horizon; ++k) {
      const double* wk = r.data() + m + static_cast<std::size_t>(k) * n;
      double* a = z.data() + static_cast<std::size_t>(k) * n;
      double* b = a + n;
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += wk[i];
      mean /= n;
      for (int i = 0; i < n; ++i) {
        const double v = weight * (wk[i] - mean);
        a[i] += v;
        b[i] -= v;
      }
    }
  };

  std::vector<double> rhs(m + smooth_rows, 0.0);
  std::copy(obs.values().begin(), obs.values().end(), rhs.begin());
  const int cap = cfg.iteration_cap(n, horizon);
  auto res = lsqr(m + smooth_rows, cols, apply, adjoint, rhs, cfg.rel_tolerance, cap);
  if (!res.converged) {
    throw ConvergenceError("dls: no convergence within " + std::to_string(cap) + " iterations (relative residual " +
                               std::to_string(res.relative_residual) + ")",
                           res.residual_norm, res.iterations);
  }

  EstimateReport report;
  report.trajectory = StrengthTrajectory(n, horizon, std::move(res.x));
  report.trajectory.center_blocks();
  report.iterations = res.iterations;
  report.final_residual = res.residual_norm;
  report.parameter = lambda;
  for (int k = 0; k < g.steps() && report.all_steps_connected; ++k) {
    report.all_steps_connected = is_connected(g, k);
  }
  return report;
}

EstimateReport dproj(const ObservationSet& obs, double tau, const SolverConfig& cfg) {
  if (!(tau > 0.0)) throw InvalidArgument("dproj: tau must be > 0");
  auto report = naive_ls(obs, cfg);
  report.trajectory = project_low_frequency(report.trajectory, tau);
  report.trajectory.center_blocks();
  report.parameter = tau;
  return report;
}

double dls_objective(const ObservationSet& obs, const StrengthTrajectory& z, double lambda) {
  const auto fitted = incidence_apply(obs.graph(), z);
  const auto y = obs.values();
  double fit = 0.0;
  for (std::size_t e = 0; e < fitted.size(); ++e) fit += (fitted[e] - y[e]) * (fitted[e] - y[e]);
  return fit + lambda * smoothness_energy(z);
}

LambdaRegime parse_lambda_regime(std::string_view name) {
  if (name == "fixed-graph" || name == "fixed") return LambdaRegime::FixedGraph;
  if (name == "evolving") return LambdaRegime::Evolving;
  if (name == "evolving-with-A3" || name == "evolving-a3") return LambdaRegime::EvolvingWithA3;
  throw InvalidArgument("unknown lambda regime '" + std::string(name) +
                        "' (expected fixed-graph, evolving, evolving-with-A3)");
}

std::string_view to_string(LambdaRegime regime) {
  switch (regime) {
    case LambdaRegime::FixedGraph: return "fixed-graph";
    case LambdaRegime::Evolving: return "evolving";
    case LambdaRegime::EvolvingWithA3: return "evolving-with-A3";
  }
  return "evolving";
}

double choose_lambda(int horizon, double smoothness, LambdaRegime regime) {
  if (horizon < 1 || !(smoothness > 0.0)) throw InvalidArgument("choose_lambda: need T >= 1 and S_T > 0");
  const double ratio = static_cast<double>(horizon) / smoothness;
  const double exponent = regime == LambdaRegime::Evolving ? 2.0 / 5.0 : 2.0 / 3.0;
  return std::pow(ratio, exponent);
}

double choose_tau(int horizon, double smoothness) {
  if (horizon < 1 || !(smoothness > 0.0)) throw InvalidArgument("choose_tau: need T >= 1 and S_T > 0");
  return std::pow(smoothness / horizon, 2.0 / 3.0);
}

}  // namespace dynsync
