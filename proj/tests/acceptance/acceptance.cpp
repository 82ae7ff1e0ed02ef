// Acceptance harness: one PASS/FAIL line per criterion.

#include <omp.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "cli_commands.hpp"
#include "dynsync/cross_validation.hpp"
#include "dynsync/diagnostics.hpp"
#include "dynsync/estimators.hpp"
#include "dynsync/experiment.hpp"
#include "dynsync/metrics.hpp"
#include "dynsync/spectral.hpp"
#include "dynsync/synth.hpp"
#include "oracle/dense_oracle.hpp"
#include "support.hpp"

using namespace dynsync;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double max_diff(const StrengthTrajectory& a, const oracle::Vector& b) {
  return testing::max_abs_diff(a.values(), std::span<const double>(b.data(), b.size()));
}

// A tau halfway between two consecutive distinct centered eigenvalues n mu_k.
double gap_tau(int n, int horizon, Rng& rng) {
  const auto path = path_eigenpairs(horizon);
  std::vector<double> levels{0.0};
  for (double mu : path.eigenvalues) levels.push_back(n * mu);
  levels.push_back(n * path.eigenvalue(0) + 2.0);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               levels.end());
  const std::size_t k = rng.uniform_index(levels.size() - 1);
  return 0.5 * (levels[k] + levels[k + 1]);
}

Verdict dense_oracle_equivalence() {
  Rng rng(101);
  double worst_dls = 0.0, worst_dproj = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(3));
    const int horizon = 1 + static_cast<int>(rng.uniform_index(6));
    const double sigma = rep % 2 == 0 ? 0.0 : 0.5;
    const auto g = testing::random_graph(n, horizon, 0.5, rng);
    auto z = testing::random_trajectory(n, horizon, rng);
    auto y = incidence_apply(g, z);
    for (double& v : y) v += sigma * rng.normal();
    const ObservationSet obs(g, y);

    const double lambda = std::exp(rng.uniform(-3.0, 3.0));
    worst_dls = std::max(worst_dls, max_diff(dls(obs, lambda).trajectory, oracle::dls(obs, lambda)));
    const double tau = gap_tau(n, horizon, rng);
    worst_dproj = std::max(worst_dproj, max_diff(dproj(obs, tau).trajectory, oracle::dproj(obs, tau)));
  }
  return {worst_dls < 1e-7 && worst_dproj < 1e-7,
          "max |dls - oracle| " + fmt(worst_dls) + ", max |dproj - oracle| " + fmt(worst_dproj)};
}

Verdict noiseless_exactness() {
  double worst_ls = 0.0, worst_proj = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    SynthConfig cfg;
    cfg.n = 8;
    cfg.horizon = 10;
    cfg.smoothness = seed % 2 == 0 ? 1.0 : 20.0;
    cfg.noise_sigma = 0.0;
    cfg.edge_probability = EdgeProbability::constant(0.4);
    cfg.require_step_connectivity = true;
    cfg.seed = 7000 + seed;
    const auto inst = generate_instance(cfg);
    const auto ls = naive_ls(inst.observations);
    worst_ls = std::max(worst_ls, testing::max_abs_diff(ls.trajectory.values(), inst.truth.values()));
    const double eps = generation_threshold(cfg.n, cfg.horizon, cfg.smoothness);
    const auto proj = dproj(inst.observations, eps);
    worst_proj = std::max(worst_proj, testing::max_abs_diff(proj.trajectory.values(), inst.truth.values()));
  }
  return {worst_ls < 1e-8 && worst_proj < 1e-8,
          "max |ls - z*| " + fmt(worst_ls) + ", max |dproj(eps) - z*| " + fmt(worst_proj)};
}

Verdict rank_law() {
  Rng pick(303);
  int passed = 0;
  for (int rep = 0; rep < 100; ++rep) {
    SynthConfig cfg;
    cfg.n = 2 + static_cast<int>(pick.uniform_index(9));
    const int max_horizon = 128 / cfg.n - 1;
    cfg.horizon = 1 + static_cast<int>(pick.uniform_index(max_horizon));
    cfg.edge_probability = EdgeProbability::constant(pick.uniform(0.05, 0.6));
    cfg.seed = pick.next_u64();
    const auto g = generate_er_sequence(cfg);
    if (nullspace_rank_check(g, std::exp(pick.uniform(-3.0, 3.0))).pass) ++passed;
  }

  int rejected = 0;
  const std::vector<GraphSequence> split{
      GraphSequence(4, 2, {{{0, 1}, {2, 3}}, {{0, 1}}, {{2, 3}}}),
      GraphSequence(3, 1, {{{0, 1}}, {{0, 1}}}),
      GraphSequence(5, 3, {{{0, 1}, {1, 2}}, {{3, 4}}, {{0, 2}}, {}}),
  };
  for (const auto& g : split) {
    if (!nullspace_rank_check(g, 1.0).pass) ++rejected;
  }
  return {passed == 100 && rejected == 3, std::to_string(passed) + "/100 connected instances pass, " +
                                              std::to_string(rejected) + "/3 disconnected rejected"};
}

Verdict spectral_correctness() {
  double worst_residual = 0.0, worst_value = 0.0;
  for (int horizon = 1; horizon <= 64; ++horizon) {
    const auto path = path_eigenpairs(horizon);
    const oracle::Matrix m = oracle::path_incidence(horizon);
    const oracle::Matrix mm = m * m.transpose();
    const double scale = std::max(path.eigenvalue(0), 1.0);
    for (int k = 0; k <= horizon; ++k) {
      const auto u = path.eigenvector(k);
      const oracle::Vector uk = Eigen::Map<const oracle::Vector>(u.data(), u.size());
      worst_residual = std::max(worst_residual, (mm * uk - path.eigenvalue(k) * uk).norm() / scale);
    }
    Eigen::SelfAdjointEigenSolver<oracle::Matrix> es(mm);
    for (int k = 0; k <= horizon; ++k) {
      worst_value = std::max(worst_value, std::abs(es.eigenvalues()(horizon - k) - path.eigenvalue(k)));
    }
  }

  Rng rng(404);
  double worst_projection = 0.0;
  for (int n = 2; n <= 8; ++n) {
    for (int horizon = 1; n * (horizon + 1) <= 48; ++horizon) {
      const LowFrequencyProjector projector(n, horizon);
      for (int rep = 0; rep < 3; ++rep) {
        const auto z = testing::random_trajectory(n, horizon, rng);
        const double tau = gap_tau(n, horizon, rng);
        const oracle::Vector dense = oracle::low_frequency_projector(n, horizon, tau) * oracle::to_vector(z.values());
        worst_projection = std::max(worst_projection, max_diff(projector.project(z, tau), dense));
      }
    }
  }
  return {worst_residual < 1e-8 && worst_value < 1e-8 && worst_projection < 1e-9,
          "eigen residual " + fmt(worst_residual) + ", eigenvalue gap " + fmt(worst_value) + ", projection " +
              fmt(worst_projection)};
}

Verdict bias_bound() {
  Rng rng(505);
  double worst_slack = -std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(12));
    const int horizon = 1 + static_cast<int>(rng.uniform_index(40));
    auto z = testing::random_trajectory(n, horizon, rng);
    // mix in smooth trajectories so S/tau is not always loose
    if (rep % 2 == 0) {
      for (int k = 1; k < z.steps(); ++k) {
        for (int i = 0; i < n; ++i) z(k, i) = z(k - 1, i) + 0.05 * rng.normal();
      }
    }
    const double tau = std::exp(rng.uniform(-4.0, 3.0));
    const double s = smoothness_energy(z);
    const auto p = project_low_frequency(z, tau);
    double residual = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) residual += std::pow(z.values()[i] - p.values()[i], 2);
    worst_slack = std::max(worst_slack, residual - s / tau);
  }
  return {worst_slack <= 1e-9, "max ||z - Pz||^2 - S/tau = " + fmt(worst_slack)};
}

Verdict smoothness_budget() {
  Rng pick(606);
  double worst_ratio = 0.0, worst_sum = 0.0;
  bool ok = true;
  for (int rep = 0; rep < 200; ++rep) {
    SynthConfig cfg;
    cfg.n = 2 + static_cast<int>(pick.uniform_index(30));
    cfg.horizon = 1 + static_cast<int>(pick.uniform_index(100));
    cfg.smoothness = std::exp(pick.uniform(-6.0, 6.0));
    cfg.seed = pick.next_u64();
    const auto z = generate_ground_truth(cfg);
    const double energy = smoothness_energy(z);
    worst_ratio = std::max(worst_ratio, energy / cfg.smoothness);
    ok = ok && energy <= cfg.smoothness;
    for (int k = 0; k < z.steps(); ++k) {
      double sum = 0.0;
      for (double v : z.block(k)) sum += v;
      worst_sum = std::max(worst_sum, std::abs(sum) / cfg.n);
      ok = ok && std::abs(sum) < 1e-12 * cfg.n;
    }
  }
  return {ok, "max energy/S_T " + fmt(worst_ratio) + ", max |block sum|/n " + fmt(worst_sum)};
}

std::string series(const ResultTable& table, const std::string& label) {
  std::string s;
  const auto t = table.horizons(label);
  const auto m = table.mean_mse(label);
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? " " : "") + fmt(t[i]) + ":" + fmt(m[i]);
  return s;
}

double slope_of(const ResultTable& table, const std::string& label) {
  const auto t = table.horizons(label);
  const auto m = table.mean_mse(label);
  return loglog_slope(t, m);
}

Verdict rate_decay() {
  RateExperimentConfig cfg;
  cfg.base.n = 20;
  cfg.base.noise_sigma = 1.0;
  cfg.base.edge_probability = EdgeProbability::uniform_range(1.0 / 20, std::log(20.0) / 20);
  cfg.base.seed = 2024;
  cfg.horizons = {16, 32, 64, 128, 256};
  cfg.smoothness = {1.0, 0.0};
  cfg.trials = 20;
  EstimatorSpec d;
  d.kind = EstimatorKind::Dls;
  d.regime = LambdaRegime::FixedGraph;
  EstimatorSpec p;
  p.kind = EstimatorKind::Dproj;
  cfg.estimators = {d, p};
  cfg.threads = omp_get_max_threads();
  const auto table = rate_experiment(cfg);

  bool ok = true;
  std::string detail;
  for (const char* label : {"dls", "dproj"}) {
    const double slope = slope_of(table, label);
    const auto m = table.mean_mse(label);
    const double ratio = m.front() / m.back();
    ok = ok && slope >= -0.6 && slope <= -0.05 && ratio >= 1.5;
    detail += std::string(label) + " slope " + fmt(slope) + " ratio " + fmt(ratio) + " [" + series(table, label) + "]; ";
  }
  return {ok, detail};
}

Verdict dynamic_beats_static() {
  RateExperimentConfig cfg;
  cfg.base.n = 20;
  cfg.base.noise_sigma = 1.0;
  cfg.base.edge_probability = EdgeProbability::constant(std::log(20.0) / 20);
  cfg.base.require_step_connectivity = true;
  cfg.base.seed = 3030;
  cfg.horizons = {16, 32, 64, 128};
  cfg.smoothness = {1.0, 0.0};
  cfg.trials = 20;
  EstimatorSpec ls;
  ls.kind = EstimatorKind::NaiveLs;
  EstimatorSpec d;
  d.kind = EstimatorKind::Dls;
  d.regime = LambdaRegime::FixedGraph;
  EstimatorSpec p;
  p.kind = EstimatorKind::Dproj;
  cfg.estimators = {ls, d, p};
  cfg.threads = omp_get_max_threads();
  const auto table = rate_experiment(cfg);

  const double ls_slope = slope_of(table, "ls");
  const double dls_slope = slope_of(table, "dls");
  const double dproj_slope = slope_of(table, "dproj");
  const double ls_last = table.mean_mse("ls").back();
  const double dls_gain = ls_last / table.mean_mse("dls").back();
  const double dproj_gain = ls_last / table.mean_mse("dproj").back();
  const bool ok = std::abs(ls_slope) < 0.1 && dls_slope < -0.05 && dproj_slope < -0.05 && dls_gain >= 2.0 &&
                  dproj_gain >= 2.0;
  return {ok, "slopes ls " + fmt(ls_slope) + " dls " + fmt(dls_slope) + " dproj " + fmt(dproj_slope) +
                  "; gain at T=128 dls " + fmt(dls_gain) + " dproj " + fmt(dproj_gain)};
}

Verdict btl_pipeline() {
  RateExperimentConfig cfg;
  cfg.base.n = 20;
  cfg.base.model = ObservationModel::Btl;
  cfg.base.btl_trials = 64;
  cfg.base.edge_probability = EdgeProbability::uniform_range(1.0 / 20, std::log(20.0) / 20);
  cfg.base.seed = 4040;
  cfg.horizons = {16, 64, 256};
  cfg.smoothness = {1.0, -1.0};
  cfg.trials = 20;
  EstimatorSpec d;
  d.kind = EstimatorKind::Dls;
  d.regime = LambdaRegime::FixedGraph;
  cfg.estimators = {d};
  cfg.threads = omp_get_max_threads();
  const auto table = rate_experiment(cfg);
  const auto m = table.mean_mse("dls");
  const bool ok = m[0] > m[1] && m[1] > m[2];
  return {ok, "dls mean mse " + series(table, "dls")};
}

Verdict cross_validation() {
  SynthConfig clean;
  clean.n = 10;
  clean.horizon = 20;
  clean.smoothness = 20.0;
  clean.noise_sigma = 0.0;
  clean.edge_probability = EdgeProbability::constant(0.6);
  clean.require_step_connectivity = true;
  clean.seed = 8080;
  const auto clean_obs = generate_instance(clean).observations;
  const double full_pass = clean.n * path_eigenpairs(clean.horizon).eigenvalue(0) + 1.0;
  CvConfig cfg;
  cfg.estimator = EstimatorKind::Dproj;
  cfg.grid = {1e-4, 1e-2, full_pass};
  cfg.repeats = 10;
  cfg.seed = 1;
  const auto exact = cross_validate(clean_obs, cfg);
  const bool exact_ok = exact.mean_error[exact.selected_index] < 1e-20 && exact.selected == full_pass;

  auto noisy = clean;
  noisy.noise_sigma = 1.0;
  noisy.smoothness = 1.0;
  noisy.seed = 8081;
  CvConfig dcfg;
  dcfg.estimator = EstimatorKind::Dls;
  const double center = std::pow(static_cast<double>(noisy.horizon), 2.0 / 3.0);
  for (int e = -3; e <= 3; ++e) dcfg.grid.push_back(center * std::pow(4.0, e));
  dcfg.seed = 2;
  const auto report = cross_validate(generate_instance(noisy).observations, dcfg);
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < dcfg.grid.size(); ++i) {
    if (report.mean_error[i] < report.mean_error[argmin]) argmin = i;
  }
  const bool noisy_ok = std::isfinite(report.selected) && report.selected_index == argmin &&
                        report.selected == dcfg.grid[argmin] && std::isfinite(report.mean_error[argmin]);
  return {exact_ok && noisy_ok, "noiseless selects tau " + fmt(exact.selected) + " (error " +
                                    fmt(exact.mean_error[exact.selected_index]) + "); noisy selects lambda " +
                                    fmt(report.selected) + " = grid[" + std::to_string(argmin) + "]"};
}

// Runs one CLI command twice and compares every output file byte for byte.
// report.json carries a wall-clock timing that is removed before comparing.
bool rerun_identical(const std::string& name, const std::vector<std::string>& args, const fs::path& root,
                     std::string& detail) {
  std::vector<fs::path> dirs;
  for (const char* suffix : {"_1", "_2"}) {
    const auto dir = root / (name + suffix);
    auto full = args;
    full.insert(full.end(), {"--threads", "1", "--out-dir", dir.string()});
    std::ostringstream out, err;
    if (cli::run(full, out, err) != 0) {
      detail += name + " failed: " + err.str();
      return false;
    }
    dirs.push_back(dir);
  }
  bool same = true;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    const auto file = entry.path().filename();
    std::string a = read_text_file(dirs[0] / file);
    std::string b = read_text_file(dirs[1] / file);
    if (file == "report.json") {
      auto ja = Json::parse(a), jb = Json::parse(b);
      ja.erase("wall_time_seconds");
      jb.erase("wall_time_seconds");
      a = ja.dump();
      b = jb.dump();
    }
    ++files;
    if (a != b) {
      same = false;
      detail += name + "/" + file.string() + " differs; ";
    }
  }
  if (same) detail += name + " (" + std::to_string(files) + " files) ok; ";
  return same;
}

Verdict determinism() {
  const auto root = fs::temp_directory_path() / ("dynsync_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  write_json_file(root / "synth.json", Json{{"n", 8}, {"T", 12}, {"S_T", 2.0}, {"sigma", 0.5}, {"seed", 5},
                                           {"edge_probability", {{"lo", 0.2}, {"hi", 0.5}}}});
  write_json_file(root / "bench.json", Json{{"n", 8},
                                           {"horizons", {8, 16}},
                                           {"smoothness", 1.0},
                                           {"trials", 3},
                                           {"estimators", {"ls", "dls", "dproj"}},
                                           {"seed", 6}});
  write_json_file(root / "cv.json", Json{{"method", "dls"}, {"grid", {0.5, 2.0, 8.0}}, {"repeats", 4}, {"seed", 7}});
  write_json_file(root / "ingest.json", Json{{"kind", "ratings"}, {"input", DYNSYNC_FIXTURE_DIR "/ratings_small.csv"}});

  std::string detail;
  bool ok = rerun_identical("synth", {"synth", "--config", (root / "synth.json").string()}, root, detail);
  const auto obs = (root / "synth_1" / "observations.json").string();
  ok = rerun_identical("estimate_ls", {"estimate", "--observations", obs, "--method", "ls"}, root, detail) && ok;
  ok = rerun_identical("estimate_dls",
                       {"estimate", "--observations", obs, "--method", "dls", "--smoothness", "2"}, root, detail) &&
       ok;
  ok = rerun_identical("estimate_dproj",
                       {"estimate", "--observations", obs, "--method", "dproj", "--parameter", "0.3"}, root,
                       detail) &&
       ok;
  ok = rerun_identical("bench", {"bench", "--config", (root / "bench.json").string()}, root, detail) && ok;
  ok = rerun_identical("cv", {"cv", "--config", (root / "cv.json").string(), "--observations", obs}, root, detail) &&
       ok;
  ok = rerun_identical("ingest", {"ingest", "--config", (root / "ingest.json").string()}, root, detail) && ok;
  ok = rerun_identical("diagnose", {"diagnose", "--input", obs}, root, detail) && ok;
  fs::remove_all(root);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"dense-oracle equivalence", dense_oracle_equivalence},
      {"noiseless exactness", noiseless_exactness},
      {"rank law", rank_law},
      {"spectral correctness", spectral_correctness},
      {"bias bound", bias_bound},
      {"smoothness budget", smoothness_budget},
      {"rate decay", rate_decay},
      {"dynamic beats static", dynamic_beats_static},
      {"BTL pipeline", btl_pipeline},
      {"cross-validation", cross_validation},
      {"CLI determinism", determinism},
  };
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[c].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    while (!v.detail.empty() && (v.detail.back() == ' ' || v.detail.back() == ';')) v.detail.pop_back();
    if (!v.pass) ++failures;
    std::printf("criterion %zu %s: %s (%s; %.1fs)\n", c + 1, criteria[c].first, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
