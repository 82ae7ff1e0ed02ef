#include "dynsync/metrics.hpp"

#include <cmath>

namespace dynsync {

namespace {

void check_shapes(const GraphSequence& g, const StrengthTrajectory& est) {
  if (g.n() != est.n() || g.horizon() != est.horizon()) throw DimensionError("metrics: observation/estimate shape mismatch");
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double trajectory_mse(const StrengthTrajectory& est, const StrengthTrajectory& truth) {
  if (est.n() != truth.n() || est.horizon() != truth.horizon()) throw DimensionError("trajectory_mse: shape mismatch");
  const int n = est.n();
  double total = 0.0;
  for (int k = 0; k < est.steps(); ++k) {
    auto a = est.block(k);
    auto b = truth.block(k);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= n;
    for (int i = 0; i < n; ++i) {
      const double d = a[i] - b[i] - mean;
      total += d * d;
    }
  }
  return total / est.steps();
}

double pairwise_mse(const ObservationSet& obs, const StrengthTrajectory& est) {
  const auto& g = obs.graph();
  check_shapes(g, est);
  double total = 0.0;
  for (int k = 0; k < g.steps(); ++k) {
    auto es = g.edges(k);
    auto ys = obs.values(k);
    for (std::size_t e = 0; e < es.size(); ++e) {
      const double r = ys[e] - (est(k, es[e].i) - est(k, es[e].j));
      total += r * r;
    }
  }
  return total / g.steps();
}

bool is_upset(double observed, double predicted) { return sign(observed) != sign(predicted); }

UpsetCount upsets(const ObservationSet& obs, const StrengthTrajectory& est) {
  const auto& g = obs.graph();
  check_shapes(g, est);
  UpsetCount out;
  for (int k = 0; k < g.steps(); ++k) {
    auto es = g.edges(k);
    auto ys = obs.values(k);
    for (std::size_t e = 0; e < es.size(); ++e) {
      out.count += is_upset(ys[e], est(k, es[e].i) - est(k, es[e].j)) ? 1 : 0;
      ++out.total;
    }
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("loglog_slope: need >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace dynsync
