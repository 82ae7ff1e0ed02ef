#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dynsync/graph_sequence.hpp"
#include "dynsync/rng.hpp"

namespace testing {

inline std::vector<dynsync::Edge> complete_edges(int n) {
  std::vector<dynsync::Edge> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) out.push_back({i, j});
  }
  return out;
}

inline std::vector<dynsync::Edge> path_edges(int n) {
  std::vector<dynsync::Edge> out;
  for (int i = 0; i + 1 < n; ++i) out.push_back({i, i + 1});
  return out;
}

// Every step holds each pair with probability p; a path on step 0 keeps the
// union connected when `connect_union` is set, a path on every step when
// `connect_steps` is set.
inline dynsync::GraphSequence random_graph(int n, int horizon, double p, dynsync::Rng& rng, bool connect_union = true,
                                           bool connect_steps = false) {
  std::vector<std::vector<dynsync::Edge>> edges(horizon + 1);
  for (int k = 0; k <= horizon; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const bool on_path = j == i + 1 && (connect_steps || (connect_union && k == 0));
        if (on_path || rng.bernoulli(p)) edges[k].push_back({i, j});
      }
    }
  }
  return dynsync::GraphSequence(n, horizon, std::move(edges));
}

inline dynsync::StrengthTrajectory random_trajectory(int n, int horizon, dynsync::Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(n) * (horizon + 1));
  for (auto& x : v) x = rng.normal();
  return dynsync::StrengthTrajectory(n, horizon, std::move(v));
}

inline std::vector<double> random_vector(std::size_t size, dynsync::Rng& rng) {
  std::vector<double> v(size);
  for (auto& x : v) x = rng.normal();
  return v;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double norm_sq(std::span<const double> a) { return dot(a, a); }

inline dynsync::StrengthTrajectory centered(dynsync::StrengthTrajectory z) {
  z.center_blocks();
  return z;
}

}  // namespace testing
