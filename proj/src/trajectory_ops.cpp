#include <cmath>

#include "dynsync/graph_sequence.hpp"

namespace dynsync {

namespace {

void centered_difference(std::span<const double> a, std::span<const double> b, double scale,
                         std::span<double> out) {
  const std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * (a[i] - b[i] - mean);
}

}  // namespace

std::vector<double> smoothness_apply(const StrengthTrajectory& z) {
  const int n = z.n();
  const int horizon = z.horizon();
  const double scale = std::sqrt(static_cast<double>(n));
  std::vector<double> out(static_cast<std::size_t>(horizon) * n);
  for (int k = 0; k < horizon; ++k) {
    centered_difference(z.block(k), z.block(k + 1), scale,
                        std::span<double>(out).subspan(static_cast<std::size_t>(k) * n, n));
  }
  return out;
}

StrengthTrajectory smoothness_adjoint(int n, int horizon, std::span<const double> w) {
  if (w.size() != static_cast<std::size_t>(horizon) * n) throw DimensionError("smoothness_adjoint: w has wrong length");
  const double scale = std::sqrt(static_cast<double>(n));
  StrengthTrajectory out(n, horizon);
  std::vector<double> c(n);
  for (int k = 0; k < horizon; ++k) {
    auto wk = w.subspan(static_cast<std::size_t>(k) * n, n);
    double mean = 0.0;
    for (double v : wk) mean += v;
    mean /= n;
    auto zk = out.block(k);
    auto zk1 = out.block(k + 1);
    for (int i = 0; i < n; ++i) {
      const double v = scale * (wk[i] - mean);
      zk[i] += v;
      zk1[i] -= v;
    }
  }
  return out;
}

double smoothness_energy(const StrengthTrajectory& z) {
  const int n = z.n();
  double total = 0.0;
  for (int k = 0; k < z.horizon(); ++k) {
    auto a = z.block(k);
    auto b = z.block(k + 1);
    double sq = 0.0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = a[i] - b[i];
      sq += d * d;
      sum += d;
    }
    total += n * sq - sum * sum;
  }
  return total;
}

}  // namespace dynsync
