#include "dynsync/synth.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dynsync/disjoint_sets.hpp"

namespace dynsync {

namespace {

constexpr int kMaxResamples = 100;

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string("edge probability: ") + what + " must lie in [0, 1]");
}

}  // namespace

void EdgeProbability::validate(int horizon) const {
  switch (kind) {
    case Kind::Constant: check_probability(lo, "p"); break;
    case Kind::UniformRange:
      check_probability(lo, "lo");
      check_probability(hi, "hi");
      if (lo > hi) throw InvalidArgument("edge probability: lo > hi");
      break;
    case Kind::Schedule:
      if (schedule.size() != static_cast<std::size_t>(horizon + 1)) {
        throw DimensionError("edge probability: schedule needs T+1 entries");
      }
      for (double p : schedule) check_probability(p, "schedule entry");
      break;
  }
}

std::string EdgeProbability::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Constant: os << "constant(" << lo << ")"; break;
    case Kind::UniformRange: os << "uniform(" << lo << "," << hi << ")"; break;
    case Kind::Schedule: os << "schedule(" << schedule.size() << " steps)"; break;
  }
  return os.str();
}

void SynthConfig::validate() const {
  if (n < 2) throw InvalidArgument("synth: n must be >= 2");
  if (horizon < 1) throw InvalidArgument("synth: T must be >= 1");
  if (!(smoothness > 0.0) || !std::isfinite(smoothness)) throw InvalidArgument("synth: S_T must be > 0");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidArgument("synth: sigma must be >= 0");
  if (model == ObservationModel::Btl && btl_trials < 1) throw InvalidArgument("synth: btl_trials must be >= 1");
  edge_probability.validate(horizon);
}

double generation_threshold(int n, int horizon, double smoothness) {
  const double rate_eps =
      std::pow(std::numbers::pi * smoothness / ((horizon + 1) * std::sqrt(static_cast<double>(n - 1))), 2.0 / 3.0);
  return std::min(smoothness, rate_eps);
}

StrengthTrajectory generate_ground_truth(const SynthConfig& cfg, const LowFrequencyProjector& projector) {
  cfg.validate();
  Rng rng = Rng::derive(cfg.seed, {stream::kTruth});
  StrengthTrajectory z(cfg.n, cfg.horizon);
  double norm_sq = 0.0;
  for (double& v : z.values()) {
    v = rng.normal();
    norm_sq += v * v;
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& v : z.values()) v *= inv;

  auto truth = projector.project(z, generation_threshold(cfg.n, cfg.horizon, cfg.smoothness));
  truth.center_blocks();

  const double energy = smoothness_energy(truth);
  if (!(energy <= cfg.smoothness * (1.0 + 1e-12))) {
    throw std::logic_error("generate_ground_truth: smoothness budget violated (" + std::to_string(energy) + " > " +
                           std::to_string(cfg.smoothness) + ")");
  }
  return truth;
}

StrengthTrajectory generate_ground_truth(const SynthConfig& cfg) {
  return generate_ground_truth(cfg, LowFrequencyProjector(cfg.n, cfg.horizon));
}

namespace {

std::vector<Edge> draw_step(int n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) edges.push_back({i, j});
    }
  }
  return edges;
}

double step_probability(const EdgeProbability& prob, int k, Rng& rng) {
  switch (prob.kind) {
    case EdgeProbability::Kind::Constant: return prob.lo;
    case EdgeProbability::Kind::UniformRange: return rng.uniform(prob.lo, prob.hi);
    case EdgeProbability::Kind::Schedule: return prob.schedule[k];
  }
  return prob.lo;
}

// Random spanning tree over the components of `sets`; returns the tree edges.
std::vector<Edge> spanning_repair(int n, DisjointSets& sets, Rng& rng) {
  std::vector<std::vector<int>> members(n);
  for (int v = 0; v < n; ++v) members[sets.find(v)].push_back(v);
  std::vector<int> roots;
  for (int v = 0; v < n; ++v) {
    if (!members[v].empty()) roots.push_back(v);
  }
  rng.shuffle(roots.begin(), roots.end());
  std::vector<Edge> added;
  for (std::size_t c = 1; c < roots.size(); ++c) {
    const auto& here = members[roots[c]];
    const auto& there = members[roots[rng.uniform_index(c)]];
    const int a = here[rng.uniform_index(here.size())];
    const int b = there[rng.uniform_index(there.size())];
    added.push_back({std::min(a, b), std::max(a, b)});
    sets.unite(a, b);
  }
  return added;
}

}  // namespace

GraphSequence generate_er_sequence(const SynthConfig& cfg, GraphGenerationStats* stats) {
  cfg.validate();
  const int steps = cfg.horizon + 1;
  GraphGenerationStats local;
  std::vector<std::vector<Edge>> edges(steps);

  if (cfg.require_step_connectivity) {
    int worst_attempts = 1;
    for (int k = 0; k < steps; ++k) {
      int attempt = 0;
      for (; attempt < kMaxResamples; ++attempt) {
        Rng rng = Rng::derive(cfg.seed, {stream::kGraph, static_cast<std::uint64_t>(attempt), static_cast<std::uint64_t>(k)});
        const double p = step_probability(cfg.edge_probability, k, rng);
        edges[k] = draw_step(cfg.n, p, rng);
        DisjointSets sets(cfg.n);
        for (const auto& e : edges[k]) sets.unite(e.i, e.j);
        if (sets.components() == 1) break;
        if (attempt + 1 == kMaxResamples) {
          Rng repair = Rng::derive(cfg.seed, {stream::kRepair, static_cast<std::uint64_t>(k)});
          auto added = spanning_repair(cfg.n, sets, repair);
          local.repair_edges += static_cast<int>(added.size());
          edges[k].insert(edges[k].end(), added.begin(), added.end());
        }
      }
      worst_attempts = std::max(worst_attempts, std::min(attempt + 1, kMaxResamples));
    }
    local.resample_attempts = worst_attempts;
  } else {
    for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
      DisjointSets sets(cfg.n);
      for (int k = 0; k < steps; ++k) {
        Rng rng = Rng::derive(cfg.seed, {stream::kGraph, static_cast<std::uint64_t>(attempt), static_cast<std::uint64_t>(k)});
        const double p = step_probability(cfg.edge_probability, k, rng);
        edges[k] = draw_step(cfg.n, p, rng);
        for (const auto& e : edges[k]) sets.unite(e.i, e.j);
      }
      local.resample_attempts = attempt + 1;
      if (sets.components() == 1) break;
      if (attempt + 1 == kMaxResamples) {
        Rng repair = Rng::derive(cfg.seed, {stream::kRepair});
        auto added = spanning_repair(cfg.n, sets, repair);
        for (const auto& e : added) edges[static_cast<int>(repair.uniform_index(steps))].push_back(e);
        local.repair_edges = static_cast<int>(added.size());
      }
    }
  }

  GraphSequence g(cfg.n, cfg.horizon, std::move(edges));
  local.all_steps_connected = true;
  for (int k = 0; k < steps && local.all_steps_connected; ++k) local.all_steps_connected = is_connected(g, k);
  if (stats) *stats = local;
  return g;
}

ObservationSet generate_observations(const StrengthTrajectory& truth, const GraphSequence& g, double sigma,
                                     std::uint64_t seed) {
  if (truth.n() != g.n() || truth.horizon() != g.horizon()) {
    throw DimensionError("generate_observations: truth and graph shapes differ");
  }
  if (!(sigma >= 0.0)) throw InvalidArgument("generate_observations: sigma must be >= 0");
  auto values = incidence_apply(g, truth);
  if (sigma > 0.0) {
    Rng rng = Rng::derive(seed, {stream::kNoise});
    for (double& y : values) y += sigma * rng.normal();
  }
  return ObservationSet(g, std::move(values));
}

double btl_log_odds(int wins, int trials) {
  return std::log((wins + 0.5) / (trials - wins + 0.5));
}

ObservationSet generate_btl_observations(const StrengthTrajectory& weights, const GraphSequence& g, int trials,
                                         std::uint64_t seed) {
  if (weights.n() != g.n() || weights.horizon() != g.horizon()) {
    throw DimensionError("generate_btl_observations: weights and graph shapes differ");
  }
  if (trials < 1) throw InvalidArgument("generate_btl_observations: L must be >= 1");
  for (double w : weights.values()) {
    if (!(w > 0.0)) throw InvalidArgument("generate_btl_observations: weights must be positive");
  }
  Rng rng = Rng::derive(seed, {stream::kBtl});
  std::vector<double> values;
  values.reserve(g.total_edges());
  for (int k = 0; k < g.steps(); ++k) {
    for (const auto& e : g.edges(k)) {
      const double wi = weights(k, e.i);
      const double wj = weights(k, e.j);
      values.push_back(btl_log_odds(rng.binomial(trials, wi / (wi + wj)), trials));
    }
  }
  return ObservationSet(g, std::move(values));
}

SyntheticInstance generate_instance(const SynthConfig& cfg, const LowFrequencyProjector& projector) {
  SyntheticInstance out;
  out.truth = generate_ground_truth(cfg, projector);
  out.graph = generate_er_sequence(cfg, &out.stats);
  if (cfg.model == ObservationModel::Btl) {
    StrengthTrajectory weights = out.truth;
    for (double& v : weights.values()) v = std::exp(v);
    out.observations = generate_btl_observations(weights, out.graph, cfg.btl_trials, cfg.seed);
  } else {
    out.observations = generate_observations(out.truth, out.graph, cfg.noise_sigma, cfg.seed);
  }
  return out;
}

SyntheticInstance generate_instance(const SynthConfig& cfg) {
  return generate_instance(cfg, LowFrequencyProjector(cfg.n, cfg.horizon));
}

}  // namespace dynsync
