#include "dynsync/graph_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "dynsync/disjoint_sets.hpp"

namespace dynsync {

GraphSequence::GraphSequence(int n, int horizon, std::vector<std::vector<Edge>> edges)
    : n_(n), horizon_(horizon), edges_(std::move(edges)) {
  if (n < 2) throw InvalidArgument("GraphSequence: n must be >= 2, got " + std::to_string(n));
  if (horizon < 1) throw InvalidArgument("GraphSequence: T must be >= 1, got " + std::to_string(horizon));
  if (edges_.size() != static_cast<std::size_t>(horizon + 1)) {
    throw DimensionError("GraphSequence: expected " + std::to_string(horizon + 1) +
                         " edge lists, got " + std::to_string(edges_.size()));
  }
  offsets_.assign(edges_.size() + 1, 0);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    auto& list = edges_[k];
    for (auto& e : list) {
      if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n) {
        throw DimensionError("GraphSequence: edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                             ") at step " + std::to_string(k) + " out of range");
      }
      if (e.i == e.j) throw InvalidArgument("GraphSequence: self-loop at step " + std::to_string(k));
      if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
      throw InvalidArgument("GraphSequence: duplicate edge at step " + std::to_string(k));
    }
    offsets_[k + 1] = offsets_[k] + list.size();
  }
}

void GraphSequence::check_step(int k) const {
  if (k < 0 || k > horizon_) {
    throw DimensionError("step " + std::to_string(k) + " outside [0, " + std::to_string(horizon_) + "]");
  }
}

std::span<const Edge> GraphSequence::edges(int k) const {
  check_step(k);
  return edges_[k];
}

std::size_t GraphSequence::edge_offset(int k) const {
  check_step(k);
  return offsets_[k];
}

bool GraphSequence::contains(int k, Edge e) const {
  if (e.i > e.j) std::swap(e.i, e.j);
  auto list = edges(k);
  return std::binary_search(list.begin(), list.end(), e);
}

// ---------------------------------------------------------------------------

StrengthTrajectory::StrengthTrajectory(int n, int horizon)
    : n_(n), horizon_(horizon), values_(static_cast<std::size_t>(n) * (horizon + 1), 0.0) {
  if (n < 1 || horizon < 0) throw InvalidArgument("StrengthTrajectory: invalid shape");
}

StrengthTrajectory::StrengthTrajectory(int n, int horizon, std::vector<double> values)
    : n_(n), horizon_(horizon), values_(std::move(values)) {
  if (n < 1 || horizon < 0) throw InvalidArgument("StrengthTrajectory: invalid shape");
  if (values_.size() != static_cast<std::size_t>(n) * (horizon + 1)) {
    throw DimensionError("StrengthTrajectory: expected " + std::to_string(n * (horizon + 1)) +
                         " values, got " + std::to_string(values_.size()));
  }
}

std::span<double> StrengthTrajectory::block(int k) {
  return std::span<double>(values_).subspan(static_cast<std::size_t>(k) * n_, n_);
}

std::span<const double> StrengthTrajectory::block(int k) const {
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(k) * n_, n_);
}

void StrengthTrajectory::center_blocks() {
  for (int k = 0; k < steps(); ++k) {
    auto b = block(k);
    double mean = 0.0;
    for (double v : b) mean += v;
    mean /= n_;
    for (double& v : b) v -= mean;
  }
}

bool StrengthTrajectory::is_block_centered(double tol) const {
  double max_abs = 0.0;
  for (double v : values_) max_abs = std::max(max_abs, std::abs(v));
  const double bound = tol >= 0.0 ? tol : 1e-9 * n_ * max_abs;
  for (int k = 0; k < steps(); ++k) {
    double sum = 0.0;
    for (double v : block(k)) sum += v;
    if (std::abs(sum) > bound) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

ObservationSet::ObservationSet(GraphSequence graph, std::vector<double> values)
    : graph_(std::move(graph)), values_(std::move(values)) {
  if (values_.size() != graph_.total_edges()) {
    throw DimensionError("ObservationSet: " + std::to_string(values_.size()) + " values for " +
                         std::to_string(graph_.total_edges()) + " edges");
  }
}

ObservationSet ObservationSet::from_triples(int n, int horizon, std::vector<Triple> triples) {
  if (horizon < 1) throw InvalidArgument("ObservationSet: T must be >= 1");
  for (auto& t : triples) {
    if (t.step < 0 || t.step > horizon) {
      throw DimensionError("ObservationSet: step " + std::to_string(t.step) + " out of range");
    }
    if (t.i > t.j) {
      std::swap(t.i, t.j);
      t.y = -t.y;
    }
  }
  std::stable_sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
    return std::tie(a.step, a.i, a.j) < std::tie(b.step, b.i, b.j);
  });
  std::vector<std::vector<Edge>> edges(horizon + 1);
  std::vector<double> values;
  values.reserve(triples.size());
  for (const auto& t : triples) {
    edges[t.step].push_back({t.i, t.j});
    values.push_back(t.y);
  }
  return ObservationSet(GraphSequence(n, horizon, std::move(edges)), std::move(values));
}

std::span<const double> ObservationSet::values(int k) const {
  return std::span<const double>(values_).subspan(graph_.edge_offset(k), graph_.edge_count(k));
}

std::vector<ObservationSet::Triple> ObservationSet::triples() const {
  std::vector<Triple> out;
  out.reserve(values_.size());
  for (int k = 0; k < graph_.steps(); ++k) {
    auto es = graph_.edges(k);
    auto ys = values(k);
    for (std::size_t e = 0; e < es.size(); ++e) out.push_back({k, es[e].i, es[e].j, ys[e]});
  }
  return out;
}

bool operator==(const ObservationSet& a, const ObservationSet& b) {
  if (a.graph_.n() != b.graph_.n() || a.graph_.horizon() != b.graph_.horizon()) return false;
  for (int k = 0; k < a.graph_.steps(); ++k) {
    auto ea = a.graph_.edges(k);
    auto eb = b.graph_.edges(k);
    if (!std::equal(ea.begin(), ea.end(), eb.begin(), eb.end())) return false;
  }
  return a.values_ == b.values_;
}

// ---------------------------------------------------------------------------

std::vector<double> incidence_apply(const GraphSequence& g, int k, std::span<const double> z_k) {
  if (z_k.size() != static_cast<std::size_t>(g.n())) throw DimensionError("incidence_apply: z_k has wrong length");
  auto es = g.edges(k);
  std::vector<double> out(es.size());
  for (std::size_t e = 0; e < es.size(); ++e) out[e] = z_k[es[e].i] - z_k[es[e].j];
  return out;
}

std::vector<double> incidence_adjoint(const GraphSequence& g, int k, std::span<const double> w_k) {
  auto es = g.edges(k);
  if (w_k.size() != es.size()) throw DimensionError("incidence_adjoint: w_k has wrong length");
  std::vector<double> out(g.n(), 0.0);
  for (std::size_t e = 0; e < es.size(); ++e) {
    out[es[e].i] += w_k[e];
    out[es[e].j] -= w_k[e];
  }
  return out;
}

std::vector<double> incidence_apply(const GraphSequence& g, const StrengthTrajectory& z) {
  if (z.n() != g.n() || z.horizon() != g.horizon()) throw DimensionError("incidence_apply: shape mismatch");
  std::vector<double> out(g.total_edges());
  for (int k = 0; k < g.steps(); ++k) {
    auto zk = z.block(k);
    auto es = g.edges(k);
    const std::size_t off = g.edge_offset(k);
    for (std::size_t e = 0; e < es.size(); ++e) out[off + e] = zk[es[e].i] - zk[es[e].j];
  }
  return out;
}

StrengthTrajectory incidence_adjoint(const GraphSequence& g, std::span<const double> w) {
  if (w.size() != g.total_edges()) throw DimensionError("incidence_adjoint: w has wrong length");
  StrengthTrajectory out(g.n(), g.horizon());
  for (int k = 0; k < g.steps(); ++k) {
    auto zk = out.block(k);
    auto es = g.edges(k);
    const std::size_t off = g.edge_offset(k);
    for (std::size_t e = 0; e < es.size(); ++e) {
      zk[es[e].i] += w[off + e];
      zk[es[e].j] -= w[off + e];
    }
  }
  return out;
}

std::vector<double> laplacian_apply(const GraphSequence& g, int k, std::span<const double> z_k) {
  return incidence_adjoint(g, k, incidence_apply(g, k, z_k));
}

bool is_connected(const GraphSequence& g, int k) {
  DisjointSets sets(g.n());
  for (const auto& e : g.edges(k)) sets.unite(e.i, e.j);
  return sets.components() == 1;
}

bool union_is_connected(const GraphSequence& g) {
  DisjointSets sets(g.n());
  for (int k = 0; k < g.steps(); ++k) {
    for (const auto& e : g.edges(k)) sets.unite(e.i, e.j);
  }
  return sets.components() == 1;
}

}  // namespace dynsync
