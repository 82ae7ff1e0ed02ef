#include "cli_commands.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "dynsync/cross_validation.hpp"
#include "dynsync/diagnostics.hpp"
#include "dynsync/estimators.hpp"
#include "dynsync/experiment.hpp"
#include "dynsync/ingest.hpp"
#include "dynsync/synth.hpp"
#include "dynsync/version.hpp"

namespace dynsync::cli {

namespace fs = std::filesystem;

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json make_manifest(std::string_view command, const Json& config, std::uint64_t seed, int threads,
                   const std::vector<std::string>& outputs) {
  return Json{{"tool", "dynsync"},
              {"version", kVersion},
              {"command", std::string(command)},
              {"config_hash", "fnv1a64:" + fnv1a_hex(config.dump())},
              {"seed", seed},
              {"threads", threads},
              {"config", config},
              {"outputs", outputs}};
}

namespace {

// ---------------------------------------------------------------------------
// Config field access with field-level errors.

class Fields {
 public:
  Fields(const Json& j, std::string scope) : j_(j), scope_(std::move(scope)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected a JSON object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const Json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  template <class T>
  T required(const char* key) {
    if (!has(key)) throw ConfigError("missing required field '" + name(key) + "'");
    return convert<T>(raw(key), name(key));
  }

  template <class T>
  T get(const char* key, T fallback) {
    if (!has(key)) return fallback;
    return convert<T>(raw(key), name(key));
  }

  std::string name(const char* key) const { return scope_.empty() ? key : scope_ + "." + key; }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown field '" + name(key.c_str()) + "'");
    }
  }

  template <class T>
  static T convert(const Json& v, const std::string& field) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("field '" + field + "' must be true or false");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ConfigError("field '" + field + "' must be a non-negative integer");
      }
      return v.get<std::uint64_t>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("field '" + field + "' must be an integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("field '" + field + "' must be a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("field '" + field + "' must be a string");
      return v.get<std::string>();
    } else {
      if (!v.is_array()) throw ConfigError("field '" + field + "' must be an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(convert<typename T::value_type>(v[i], field + "[" + std::to_string(i) + "]"));
      }
      return out;
    }
  }

 private:
  std::string where() const { return scope_.empty() ? "config: " : "field '" + scope_ + "': "; }

  const Json& j_;
  std::string scope_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

Json load_config(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": not valid JSON (" + e.what() + ")");
  }
}

// Library validation failures on user-supplied settings are config errors.
template <class F>
void validated(F&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------
// Shared option groups.

struct Common {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config's seed)");
  cmd->add_option("--threads", c.threads, "Thread cap for parallel kernels; 1 is the bit-reproducible reference")
      ->capture_default_str();
  cmd->add_option("--out-dir", c.out_dir, "Output directory (created if missing)")->capture_default_str();
}

fs::path prepare_out_dir(const Common& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec || !fs::is_directory(c.out_dir)) throw IoError("cannot create output directory " + c.out_dir);
  return fs::path(c.out_dir);
}

void apply_threads(const Common& c) {
  require(c.threads >= 1, "flag '--threads' must be >= 1");
  omp_set_num_threads(c.threads);
}

std::string csv_text(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Config <-> struct conversions.

EdgeProbability parse_edge_probability(Fields& f, const char* key) {
  if (!f.has(key)) return EdgeProbability::constant(0.5);
  const Json& v = f.raw(key);
  const std::string field = f.name(key);
  if (v.is_number()) return EdgeProbability::constant(v.get<double>());
  if (v.is_array()) return EdgeProbability::per_step(Fields::convert<std::vector<double>>(v, field));
  if (v.is_object()) {
    Fields sub(v, field);
    const double lo = sub.required<double>("lo");
    const double hi = sub.required<double>("hi");
    sub.reject_unknown();
    return EdgeProbability::uniform_range(lo, hi);
  }
  throw ConfigError("field '" + field + "' must be a number, an array or {\"lo\", \"hi\"}");
}

Json edge_probability_to_json(const EdgeProbability& p) {
  switch (p.kind) {
    case EdgeProbability::Kind::Constant: return p.lo;
    case EdgeProbability::Kind::UniformRange: return Json{{"lo", p.lo}, {"hi", p.hi}};
    case EdgeProbability::Kind::Schedule: return p.schedule;
  }
  return p.lo;
}

ObservationModel parse_model(const std::string& name, const std::string& field) {
  if (name == "transync") return ObservationModel::TranSync;
  if (name == "btl") return ObservationModel::Btl;
  throw ConfigError("field '" + field + "' must be \"transync\" or \"btl\"");
}

// Fields shared by synth and bench configs.
void parse_generation(Fields& f, SynthConfig& cfg) {
  cfg.noise_sigma = f.get<double>("sigma", 1.0);
  cfg.edge_probability = parse_edge_probability(f, "edge_probability");
  cfg.model = parse_model(f.get<std::string>("model", "transync"), f.name("model"));
  cfg.btl_trials = f.get<int>("btl_trials", 1);
  cfg.require_step_connectivity = f.get<bool>("require_step_connectivity", false);
  cfg.seed = f.get<std::uint64_t>("seed", 0);
  require(cfg.noise_sigma >= 0.0, "field 'sigma' must be >= 0");
  require(cfg.btl_trials >= 1, "field 'btl_trials' must be >= 1");
}

Json generation_to_json(const SynthConfig& cfg) {
  return Json{{"sigma", cfg.noise_sigma},
              {"edge_probability", edge_probability_to_json(cfg.edge_probability)},
              {"model", cfg.model == ObservationModel::Btl ? "btl" : "transync"},
              {"btl_trials", cfg.btl_trials},
              {"require_step_connectivity", cfg.require_step_connectivity},
              {"seed", cfg.seed}};
}

SolverConfig parse_solver(Fields& f) {
  SolverConfig s;
  s.rel_tolerance = f.get<double>("tolerance", s.rel_tolerance);
  s.max_iterations = f.get<int>("max_iterations", s.max_iterations);
  require(s.rel_tolerance > 0.0 && s.rel_tolerance < 1.0, "field 'tolerance' must lie in (0, 1)");
  require(s.max_iterations >= 0, "field 'max_iterations' must be >= 0 (0 selects the default)");
  return s;
}

EstimatorKind parse_method(const std::string& name, const std::string& field) {
  try {
    return parse_estimator_kind(name);
  } catch (const InvalidArgument&) {
    throw ConfigError("field '" + field + "' must be one of ls, dls, dproj (got \"" + name + "\")");
  }
}

LambdaRegime parse_regime(const std::string& name, const std::string& field) {
  try {
    return parse_lambda_regime(name);
  } catch (const InvalidArgument&) {
    throw ConfigError("field '" + field + "' must be one of fixed-graph, evolving, evolving-with-A3");
  }
}

EstimatorSpec parse_estimator_spec(const Json& v, const std::string& field) {
  EstimatorSpec spec;
  if (v.is_string()) {
    spec.kind = parse_method(v.get<std::string>(), field);
    return spec;
  }
  Fields f(v, field);
  spec.kind = parse_method(f.required<std::string>("method"), f.name("method"));
  if (f.has("parameter")) {
    const Json& p = f.raw("parameter");
    if (p.is_number()) {
      spec.fixed_parameter = p.get<double>();
      require(*spec.fixed_parameter > 0.0, "field '" + f.name("parameter") + "' must be > 0");
    } else if (!(p.is_string() && p.get<std::string>() == "auto")) {
      throw ConfigError("field '" + f.name("parameter") + "' must be a positive number or \"auto\"");
    }
  }
  spec.regime = parse_regime(f.get<std::string>("regime", "evolving"), f.name("regime"));
  f.reject_unknown();
  return spec;
}

Json estimator_spec_to_json(const EstimatorSpec& spec) {
  Json j{{"method", std::string(to_string(spec.kind))}};
  if (spec.fixed_parameter) {
    j["parameter"] = *spec.fixed_parameter;
  } else {
    j["parameter"] = "auto";
  }
  j["regime"] = std::string(to_string(spec.regime));
  return j;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const std::string& config_path, const Common& common, std::ostream& out) {
  const Json raw = load_config(config_path);
  Fields f(raw, "");
  SynthConfig cfg;
  cfg.n = f.required<int>("n");
  cfg.horizon = f.required<int>("T");
  cfg.smoothness = f.required<double>("S_T");
  parse_generation(f, cfg);
  f.reject_unknown();
  if (common.seed) cfg.seed = *common.seed;
  require(cfg.n >= 2, "field 'n' must be >= 2");
  require(cfg.horizon >= 1, "field 'T' must be >= 1");
  require(cfg.smoothness > 0.0 && std::isfinite(cfg.smoothness), "field 'S_T' must be a positive number");
  validated([&] { cfg.validate(); });
  apply_threads(common);

  Json effective{{"n", cfg.n}, {"T", cfg.horizon}, {"S_T", cfg.smoothness}};
  effective.update(generation_to_json(cfg));

  const auto dir = prepare_out_dir(common);
  const auto inst = generate_instance(cfg);
  write_json_file(dir / "graphs.json", graph_to_json(inst.graph));
  write_json_file(dir / "truth.json", trajectory_to_json(inst.truth));
  write_json_file(dir / "observations.json", observations_to_json(inst.observations));
  write_text_file(dir / "observations.csv", csv_text([&](std::ostream& os) { write_observations_csv(os, inst.observations); }));
  const std::vector<std::string> outputs{"graphs.json", "truth.json", "observations.json", "observations.csv"};
  write_json_file(dir / "manifest.json", make_manifest("synth", effective, cfg.seed, common.threads, outputs));

  out << "synth: n=" << cfg.n << " T=" << cfg.horizon << " edges=" << inst.graph.total_edges()
      << " resamples=" << inst.stats.resample_attempts << " repair_edges=" << inst.stats.repair_edges << "\n";
  if (!inst.stats.all_steps_connected) out << "synth: warning: some steps are disconnected\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
  std::string observations;
  std::string method;
  std::string parameter = "auto";
  std::optional<double> smoothness;
  std::string regime = "evolving";
  double tolerance = SolverConfig{}.rel_tolerance;
  int max_iterations = 0;
};

int cmd_estimate(const EstimateOptions& o, const Common& common, std::ostream& out) {
  const EstimatorKind kind = parse_method(o.method, "--method");
  const LambdaRegime regime = parse_regime(o.regime, "--regime");
  SolverConfig solver;
  solver.rel_tolerance = o.tolerance;
  solver.max_iterations = o.max_iterations;
  require(solver.rel_tolerance > 0.0 && solver.rel_tolerance < 1.0, "flag '--tolerance' must lie in (0, 1)");
  require(solver.max_iterations >= 0, "flag '--max-iterations' must be >= 0");
  apply_threads(common);

  const std::string obs_text = read_text_file(o.observations);
  const auto obs = read_observations_file(o.observations);
  const int horizon = obs.graph().horizon();

  double parameter = 0.0;
  if (kind != EstimatorKind::NaiveLs) {
    if (o.parameter == "auto") {
      require(o.smoothness.has_value(), "flag '--smoothness' (S_T) is required with --parameter auto");
      require(*o.smoothness > 0.0, "flag '--smoothness' must be > 0");
      parameter = kind == EstimatorKind::Dls ? choose_lambda(horizon, *o.smoothness, regime)
                                             : choose_tau(horizon, *o.smoothness);
    } else {
      try {
        std::size_t used = 0;
        parameter = std::stod(o.parameter, &used);
        if (used != o.parameter.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ConfigError("flag '--parameter' must be a positive number or auto (got \"" + o.parameter + "\")");
      }
      require(parameter > 0.0, "flag '--parameter' must be > 0");
    }
  }

  Json effective{{"observations", fs::path(o.observations).filename().string()},
                 {"observations_hash", "fnv1a64:" + fnv1a_hex(obs_text)},
                 {"method", std::string(to_string(kind))},
                 {"parameter", o.parameter},
                 {"smoothness", o.smoothness ? Json(*o.smoothness) : Json(nullptr)},
                 {"regime", std::string(to_string(regime))},
                 {"tolerance", solver.rel_tolerance},
                 {"max_iterations", solver.max_iterations}};

  const auto dir = prepare_out_dir(common);
  const auto start = std::chrono::steady_clock::now();
  EstimatorSpec spec;
  spec.kind = kind;
  const auto report = run_estimator(spec, obs, parameter, solver);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_json_file(dir / "trajectory.json", trajectory_to_json(report.trajectory));
  write_text_file(dir / "trajectory.csv", csv_text([&](std::ostream& os) { write_trajectory_csv(os, report.trajectory); }));
  Json rep{{"method", std::string(to_string(kind))},
           {"parameter", report.parameter},
           {"regime", std::string(to_string(regime))},
           {"iterations", report.iterations},
           {"final_residual", report.final_residual},
           {"all_steps_connected", report.all_steps_connected},
           {"n", obs.graph().n()},
           {"T", horizon},
           {"wall_time_seconds", seconds}};
  write_json_file(dir / "report.json", rep);
  const std::vector<std::string> outputs{"trajectory.json", "trajectory.csv", "report.json"};
  write_json_file(dir / "manifest.json", make_manifest("estimate", effective, common.seed.value_or(0), common.threads, outputs));

  out << "estimate: method=" << to_string(kind) << " parameter=" << format_double(report.parameter)
      << " iterations=" << report.iterations << " residual=" << format_double(report.final_residual) << "\n";
  if (!report.all_steps_connected) out << "estimate: warning: some steps are disconnected\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const std::string& config_path, const Common& common, std::ostream& out) {
  const Json raw = load_config(config_path);
  Fields f(raw, "");
  RateExperimentConfig cfg;
  cfg.base.n = f.required<int>("n");
  cfg.horizons = f.required<std::vector<int>>("horizons");
  if (!f.has("smoothness")) throw ConfigError("missing required field 'smoothness'");
  {
    const Json& s = f.raw("smoothness");
    if (s.is_number()) {
      cfg.smoothness = {s.get<double>(), 0.0};
    } else {
      Fields sf(s, "smoothness");
      cfg.smoothness.scale = sf.required<double>("scale");
      cfg.smoothness.exponent = sf.get<double>("exponent", 0.0);
      sf.reject_unknown();
    }
  }
  parse_generation(f, cfg.base);
  cfg.trials = f.get<int>("trials", 20);
  if (!f.has("estimators")) throw ConfigError("missing required field 'estimators'");
  {
    const Json& list = f.raw("estimators");
    require(list.is_array() && !list.empty(), "field 'estimators' must be a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.estimators.push_back(parse_estimator_spec(list[i], "estimators[" + std::to_string(i) + "]"));
    }
  }
  cfg.solver = parse_solver(f);
  f.reject_unknown();
  if (common.seed) cfg.base.seed = *common.seed;
  cfg.threads = common.threads;
  require(cfg.base.n >= 2, "field 'n' must be >= 2");
  require(!cfg.horizons.empty(), "field 'horizons' must not be empty");
  for (int t : cfg.horizons) require(t >= 1, "field 'horizons' entries must be >= 1");
  require(cfg.trials >= 1, "field 'trials' must be >= 1");
  require(cfg.smoothness.scale > 0.0, "field 'smoothness' scale must be > 0");
  validated([&] { cfg.validate(); });
  apply_threads(common);

  Json estimators = Json::array();
  for (const auto& spec : cfg.estimators) estimators.push_back(estimator_spec_to_json(spec));
  Json effective{{"n", cfg.base.n},
                 {"horizons", cfg.horizons},
                 {"smoothness", {{"scale", cfg.smoothness.scale}, {"exponent", cfg.smoothness.exponent}}},
                 {"trials", cfg.trials},
                 {"estimators", estimators},
                 {"tolerance", cfg.solver.rel_tolerance},
                 {"max_iterations", cfg.solver.max_iterations}};
  effective.update(generation_to_json(cfg.base));

  const auto dir = prepare_out_dir(common);
  const auto table = rate_experiment(cfg);
  write_text_file(dir / "results.csv", csv_text([&](std::ostream& os) { write_result_table_csv(os, table); }));
  write_json_file(dir / "results.json", result_table_to_json(table));
  const std::vector<std::string> outputs{"results.csv", "results.json"};
  write_json_file(dir / "manifest.json", make_manifest("bench", effective, cfg.base.seed, common.threads, outputs));

  for (const auto& row : table.rows) {
    out << "bench: T=" << row.horizon << " " << row.estimator << " mean_mse=" << format_double(row.mean_mse)
        << " failures=" << row.failures << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// cv

int cmd_cv(const std::string& config_path, const std::string& observations, const Common& common, std::ostream& out) {
  const Json raw = load_config(config_path);
  Fields f(raw, "");
  CvConfig cfg;
  cfg.estimator = parse_method(f.required<std::string>("method"), "method");
  cfg.grid = f.required<std::vector<double>>("grid");
  {
    const auto name = f.get<std::string>("criterion", "mse");
    try {
      cfg.criterion = parse_cv_criterion(name);
    } catch (const InvalidArgument&) {
      throw ConfigError("field 'criterion' must be \"mse\" or \"upsets\"");
    }
  }
  cfg.repeats = f.get<int>("repeats", 10);
  cfg.seed = f.get<std::uint64_t>("seed", 0);
  cfg.solver = parse_solver(f);
  f.reject_unknown();
  if (common.seed) cfg.seed = *common.seed;
  require(cfg.estimator != EstimatorKind::NaiveLs, "field 'method' must be dls or dproj");
  require(!cfg.grid.empty(), "field 'grid' must not be empty");
  for (double v : cfg.grid) require(v > 0.0, "field 'grid' entries must be > 0");
  require(cfg.repeats >= 1, "field 'repeats' must be >= 1");
  validated([&] { cfg.validate(); });
  apply_threads(common);

  const std::string obs_text = read_text_file(observations);
  const auto obs = read_observations_file(observations);

  Json effective{{"observations", fs::path(observations).filename().string()},
                 {"observations_hash", "fnv1a64:" + fnv1a_hex(obs_text)},
                 {"method", std::string(to_string(cfg.estimator))},
                 {"grid", cfg.grid},
                 {"criterion", std::string(to_string(cfg.criterion))},
                 {"repeats", cfg.repeats},
                 {"seed", cfg.seed},
                 {"tolerance", cfg.solver.rel_tolerance},
                 {"max_iterations", cfg.solver.max_iterations}};

  const auto dir = prepare_out_dir(common);
  const auto report = cross_validate(obs, cfg);
  write_json_file(dir / "cv.json", cv_report_to_json(report));
  write_text_file(dir / "cv.csv", csv_text([&](std::ostream& os) { write_cv_report_csv(os, report); }));
  const std::vector<std::string> outputs{"cv.json", "cv.csv"};
  write_json_file(dir / "manifest.json", make_manifest("cv", effective, cfg.seed, common.threads, outputs));

  out << "cv: selected " << format_double(report.selected) << " (mean error "
      << format_double(report.mean_error[report.selected_index]) << ")\n";
  for (const auto& w : report.warnings) out << "cv: warning: " << w << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// ingest

int cmd_ingest(const std::string& config_path, const Common& common, std::ostream& out) {
  const Json raw = load_config(config_path);
  Fields f(raw, "");
  const std::string kind_name = f.required<std::string>("kind");
  require(kind_name == "ratings" || kind_name == "matches", "field 'kind' must be \"ratings\" or \"matches\"");
  const RecordKind kind = kind_name == "ratings" ? RecordKind::Ratings : RecordKind::Matches;
  const std::string input = f.required<std::string>("input");
  const std::string merge =
      f.get<std::string>("merge", kind == RecordKind::Ratings ? "until-connected" : "fixed");
  require(merge == "until-connected" || merge == "fixed", "field 'merge' must be \"until-connected\" or \"fixed\"");
  const int window = f.get<int>("window", 1);
  require(window >= 1, "field 'window' must be >= 1");
  const int top_items = f.get<int>("top_items", 0);
  require(top_items >= 0, "field 'top_items' must be >= 0 (0 keeps every item)");
  f.reject_unknown();
  apply_threads(common);

  fs::path input_path(input);
  if (input_path.is_relative()) input_path = fs::path(config_path).parent_path() / input_path;
  const std::string text = read_text_file(input_path);
  std::istringstream in(text);
  std::vector<ScoreRecord> records;
  try {
    records = kind == RecordKind::Ratings ? read_ratings_csv(in) : read_matches_csv(in);
  } catch (const InvalidArgument& e) {
    throw IoError(input_path.string() + ": " + e.what());
  }
  if (top_items > 0) records = select_top_items(records, top_items);

  const MergePlan plan =
      merge == "fixed" ? plan_fixed_windows(records, window, kind) : plan_merge_until_connected(records, kind);
  const auto result = kind == RecordKind::Ratings ? build_observations_ratings(records, plan)
                                                  : build_observations_matches(records, plan);

  Json effective{{"kind", kind_name},
                 {"input", input_path.filename().string()},
                 {"input_hash", "fnv1a64:" + fnv1a_hex(text)},
                 {"merge", merge},
                 {"window", window},
                 {"top_items", top_items}};

  const auto dir = prepare_out_dir(common);
  write_json_file(dir / "observations.json", observations_to_json(result.observations));
  write_text_file(dir / "observations.csv",
                  csv_text([&](std::ostream& os) { write_observations_csv(os, result.observations); }));
  write_text_file(dir / "items.csv", csv_text([&](std::ostream& os) { write_item_map_csv(os, result.items); }));
  Json windows = Json::array();
  for (int w = 0; w < plan.windows(); ++w) {
    windows.push_back({{"first_unit", plan.groups[w].first},
                       {"last_unit", plan.groups[w].second},
                       {"connected", static_cast<bool>(result.step_connected[w])}});
  }
  write_json_file(dir / "plan.json", Json{{"windows", windows},
                                          {"union_connected", result.union_connected},
                                          {"warnings", plan.warnings}});
  const std::vector<std::string> outputs{"observations.json", "observations.csv", "items.csv", "plan.json"};
  write_json_file(dir / "manifest.json", make_manifest("ingest", effective, common.seed.value_or(0), common.threads, outputs));

  out << "ingest: items=" << result.items.size() << " windows=" << plan.windows()
      << " edges=" << result.observations.graph().total_edges()
      << " union_connected=" << (result.union_connected ? "yes" : "no") << "\n";
  for (const auto& w : plan.warnings) out << "ingest: warning: " << w << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// diagnose

GraphSequence read_graph_file(const std::string& path) {
  if (fs::path(path).extension() == ".csv") return read_observations_file(path).graph();
  const Json j = read_json_file(path);
  if (j.contains("values")) return read_observations_file(path).graph();
  try {
    return graph_from_json(j);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

int cmd_diagnose(const std::string& input, double lambda, const std::vector<double>& kappas, const Common& common,
                 std::ostream& out) {
  require(lambda > 0.0, "flag '--lambda' must be > 0");
  for (double k : kappas) require(k > 0.0, "flag '--kappa' entries must be > 0");
  apply_threads(common);
  const std::string text = read_text_file(input);
  const auto g = read_graph_file(input);

  Json steps = Json::array();
  for (int k = 0; k < g.steps(); ++k) {
    const auto f = fiedler_value(g, k);
    steps.push_back({{"step", k}, {"fiedler", f.value}, {"connected", f.connected}, {"edges", g.edge_count(k)}});
  }
  const auto ext = laplacian_extremes(g);
  Json report{{"n", g.n()},
              {"T", g.horizon()},
              {"steps", steps},
              {"lambda_min_L", ext.lambda_min},
              {"norm_L", ext.norm},
              {"all_steps_connected", ext.all_connected},
              {"union_connected", union_is_connected(g)},
              {"lambda", lambda}};
  try {
    const auto r = nullspace_rank_check(g, lambda);
    report["rank_check"] = {{"rank", r.rank},
                            {"expected_rank", r.expected_rank},
                            {"max_block_mean_residual", r.max_block_mean_residual},
                            {"pass", r.pass}};
    Json margins = Json::array();
    for (double kappa : kappas) margins.push_back({{"kappa", kappa}, {"margin", assumption3_margin(g, lambda, kappa)}});
    report["assumption3"] = margins;
  } catch (const UnsupportedSize& e) {
    report["rank_check"] = {{"skipped", e.what()}};
    report["assumption3"] = {{"skipped", e.what()}};
  }

  Json effective{{"input", fs::path(input).filename().string()},
                 {"input_hash", "fnv1a64:" + fnv1a_hex(text)},
                 {"lambda", lambda},
                 {"kappa", kappas}};
  const auto dir = prepare_out_dir(common);
  write_json_file(dir / "diagnostics.json", report);
  write_json_file(dir / "manifest.json",
                  make_manifest("diagnose", effective, common.seed.value_or(0), common.threads, {"diagnostics.json"}));
  out << "diagnose: lambda_min(L)=" << format_double(ext.lambda_min) << " ||L||=" << format_double(ext.norm);
  if (report["rank_check"].contains("pass")) out << " rank_check=" << (report["rank_check"]["pass"].get<bool>() ? "pass" : "fail");
  out << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic TranSync: smoothness-constrained ranking from time-evolving pairwise comparisons", "dynsync"};
  app.set_version_flag("--version", kVersion);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");
  app.require_subcommand(1);

  Common common;

  std::string synth_config;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic instance (graphs, truth, observations)");
  synth->add_option("--config", synth_config,
                    "JSON config: n, T, S_T (required); sigma=1, edge_probability=0.5 (number, [per step] or "
                    "{lo,hi}), model=transync|btl, btl_trials=1, require_step_connectivity=false, seed=0")
      ->required();
  add_common(synth, common);

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate a strength trajectory from observations");
  estimate->add_option("--observations", est.observations, "Observations file (.json or .csv)")->required();
  estimate->add_option("--method", est.method, "ls, dls or dproj")->required();
  estimate->add_option("--parameter", est.parameter, "lambda (dls) or tau (dproj), or auto")->capture_default_str();
  estimate->add_option("--smoothness", est.smoothness, "S_T for --parameter auto");
  estimate->add_option("--regime", est.regime, "lambda rule: fixed-graph, evolving, evolving-with-A3")
      ->capture_default_str();
  estimate->add_option("--tolerance", est.tolerance, "LSQR relative tolerance")->capture_default_str();
  estimate->add_option("--max-iterations", est.max_iterations, "LSQR iteration cap (0: 10 n (T+1))")
      ->capture_default_str();
  add_common(estimate, common);

  std::string bench_config;
  auto* bench = app.add_subcommand("bench", "Monte Carlo error-rate experiment over a grid of horizons");
  bench->add_option("--config", bench_config,
                    "JSON config: n, horizons, smoothness (number or {scale, exponent}: S_T = scale T^exponent), "
                    "estimators ([\"dls\"] or [{method, parameter=auto, regime=evolving}]) required; trials=20, "
                    "tolerance=1e-10, max_iterations=0 plus the synth generation fields")
      ->required();
  add_common(bench, common);

  std::string cv_config, cv_observations;
  auto* cv = app.add_subcommand("cv", "Cross-validate lambda or tau by holding out one edge per step");
  cv->add_option("--config", cv_config,
                 "JSON config: method (dls|dproj), grid required; criterion=mse|upsets, repeats=10, seed=0, "
                 "tolerance=1e-10, max_iterations=0")
      ->required();
  cv->add_option("--observations", cv_observations, "Observations file (.json or .csv)")->required();
  add_common(cv, common);

  std::string ingest_config;
  auto* ingest = app.add_subcommand("ingest", "Turn rating or match CSV records into observations");
  ingest->add_option("--config", ingest_config,
                     "JSON config: kind (ratings|matches), input (CSV path, relative to the config) required; "
                     "merge=until-connected (ratings) or fixed (matches), window=1, top_items=0 (all)")
      ->required();
  add_common(ingest, common);

  std::string diag_input;
  double diag_lambda = 1.0;
  std::vector<double> diag_kappa{1.1, 2.0, 10.0};
  auto* diagnose = app.add_subcommand("diagnose", "Dense spectral diagnostics of a graph sequence");
  diagnose->add_option("--input", diag_input, "Graph or observations file")->required();
  diagnose->add_option("--lambda", diag_lambda, "lambda for the rank and margin checks")->capture_default_str();
  diagnose->add_option("--kappa", diag_kappa, "kappa values for the assumption3 margin check")->capture_default_str();
  add_common(diagnose, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "dynsync: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*synth) return cmd_synth(synth_config, common, out);
    if (*estimate) return cmd_estimate(est, common, out);
    if (*bench) return cmd_bench(bench_config, common, out);
    if (*cv) return cmd_cv(cv_config, cv_observations, common, out);
    if (*ingest) return cmd_ingest(ingest_config, common, out);
    if (*diagnose) return cmd_diagnose(diag_input, diag_lambda, diag_kappa, common, out);
  } catch (const ConfigError& e) {
    err << "dynsync: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "dynsync: I/O error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "dynsync: I/O error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const PreconditionError& e) {
    err << "dynsync: estimator error: " << e.what() << "\n";
    return kEstimatorError;
  } catch (const ConvergenceError& e) {
    err << "dynsync: estimator error: " << e.what() << " (residual " << format_double(e.residual()) << " after "
        << e.iterations() << " iterations)\n";
    return kEstimatorError;
  } catch (const UnsupportedSize& e) {
    err << "dynsync: estimator error: " << e.what() << "\n";
    return kEstimatorError;
  } catch (const std::invalid_argument& e) {
    err << "dynsync: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "dynsync: internal error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace dynsync::cli
