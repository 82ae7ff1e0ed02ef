#include "dynsync/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dynsync {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw IoError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("field '") + key + "': " + e.what());
  }
}

// NaN and infinities are not representable in JSON.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json graph_to_json(const GraphSequence& g) {
  Json edges = Json::array();
  for (int k = 0; k < g.steps(); ++k) {
    Json step = Json::array();
    for (const auto& e : g.edges(k)) step.push_back({e.i, e.j});
    edges.push_back(std::move(step));
  }
  return Json{{"n", g.n()}, {"T", g.horizon()}, {"edges", std::move(edges)}};
}

GraphSequence graph_from_json(const Json& j) {
  const int n = get_field<int>(j, "n");
  const int horizon = get_field<int>(j, "T");
  const auto raw = get_field<std::vector<std::vector<std::array<int, 2>>>>(j, "edges");
  if (static_cast<int>(raw.size()) != horizon + 1) {
    throw IoError("field 'edges': expected " + std::to_string(horizon + 1) + " steps, got " +
                  std::to_string(raw.size()));
  }
  std::vector<std::vector<Edge>> edges(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    for (const auto& e : raw[k]) edges[k].push_back({e[0], e[1]});
  }
  try {
    return GraphSequence(n, horizon, std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
}

Json observations_to_json(const ObservationSet& obs) {
  Json j = graph_to_json(obs.graph());
  Json values = Json::array();
  for (int k = 0; k < obs.graph().steps(); ++k) {
    Json step = Json::array();
    for (double y : obs.values(k)) step.push_back(y);
    values.push_back(std::move(step));
  }
  j["values"] = std::move(values);
  return j;
}

ObservationSet observations_from_json(const Json& j) {
  const int n = get_field<int>(j, "n");
  const int horizon = get_field<int>(j, "T");
  const auto raw = get_field<std::vector<std::vector<std::array<int, 2>>>>(j, "edges");
  const auto values = get_field<std::vector<std::vector<double>>>(j, "values");
  if (values.size() != raw.size()) throw IoError("fields 'edges' and 'values' differ in step count");
  std::vector<ObservationSet::Triple> triples;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (values[k].size() != raw[k].size()) {
      throw IoError("step " + std::to_string(k) + ": 'edges' and 'values' differ in length");
    }
    for (std::size_t e = 0; e < raw[k].size(); ++e) {
      triples.push_back({static_cast<int>(k), raw[k][e][0], raw[k][e][1], values[k][e]});
    }
  }
  if (static_cast<int>(raw.size()) != horizon + 1) {
    throw IoError("field 'edges': expected " + std::to_string(horizon + 1) + " steps");
  }
  try {
    return ObservationSet::from_triples(n, horizon, std::move(triples));
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
}

void write_observations_csv(std::ostream& out, const ObservationSet& obs) {
  out << "step,i,j,y\n";
  for (const auto& t : obs.triples()) out << t.step << ',' << t.i << ',' << t.j << ',' << format_double(t.y) << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

template <class T>
T parse_number(const std::string& s, int line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("line " + std::to_string(line) + ": cannot parse '" + s + "'");
  }
  return v;
}

}  // namespace

ObservationSet read_observations_csv(std::istream& in, std::optional<int> n, std::optional<int> horizon) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("observations CSV is empty");
  if (split_csv(line) != std::vector<std::string>{"step", "i", "j", "y"}) {
    throw IoError("observations CSV header must be step,i,j,y");
  }
  std::vector<ObservationSet::Triple> triples;
  int max_step = 0, max_item = 1;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 4) throw IoError("line " + std::to_string(lineno) + ": expected 4 columns");
    ObservationSet::Triple t{parse_number<int>(f[0], lineno), parse_number<int>(f[1], lineno),
                             parse_number<int>(f[2], lineno), parse_number<double>(f[3], lineno)};
    max_step = std::max(max_step, t.step);
    max_item = std::max({max_item, t.i, t.j});
    triples.push_back(t);
  }
  try {
    return ObservationSet::from_triples(n.value_or(max_item + 1), horizon.value_or(std::max(1, max_step)),
                                        std::move(triples));
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
}

Json trajectory_to_json(const StrengthTrajectory& z) {
  Json values = Json::array();
  for (int k = 0; k < z.steps(); ++k) {
    const auto b = z.block(k);
    values.push_back(std::vector<double>(b.begin(), b.end()));
  }
  return Json{{"n", z.n()}, {"T", z.horizon()}, {"values", std::move(values)}};
}

StrengthTrajectory trajectory_from_json(const Json& j) {
  const int n = get_field<int>(j, "n");
  const int horizon = get_field<int>(j, "T");
  const auto values = get_field<std::vector<std::vector<double>>>(j, "values");
  if (static_cast<int>(values.size()) != horizon + 1) throw IoError("field 'values': wrong number of steps");
  std::vector<double> flat;
  for (const auto& b : values) {
    if (static_cast<int>(b.size()) != n) throw IoError("field 'values': block of wrong length");
    flat.insert(flat.end(), b.begin(), b.end());
  }
  try {
    return StrengthTrajectory(n, horizon, std::move(flat));
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
}

void write_trajectory_csv(std::ostream& out, const StrengthTrajectory& z) {
  out << "step,item,value\n";
  for (int k = 0; k < z.steps(); ++k) {
    for (int i = 0; i < z.n(); ++i) out << k << ',' << i << ',' << format_double(z(k, i)) << '\n';
  }
}

void write_result_table_csv(std::ostream& out, const ResultTable& table) {
  out << "T,estimator,parameter,mean_mse,std_mse,trials,failures,disconnected_step_trials\n";
  for (const auto& r : table.rows) {
    out << r.horizon << ',' << r.estimator << ',' << format_double(r.parameter) << ',' << format_double(r.mean_mse)
        << ',' << format_double(r.std_mse) << ',' << r.trials << ',' << r.failures << ','
        << r.disconnected_step_trials << '\n';
  }
}

Json result_table_to_json(const ResultTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"T", r.horizon},
                    {"estimator", r.estimator},
                    {"parameter", number_or_null(r.parameter)},
                    {"mean_mse", number_or_null(r.mean_mse)},
                    {"std_mse", number_or_null(r.std_mse)},
                    {"trials", r.trials},
                    {"failures", r.failures},
                    {"disconnected_step_trials", r.disconnected_step_trials}});
  }
  return Json{{"n", table.n},
              {"smoothness", table.smoothness},
              {"sigma", table.sigma},
              {"seed", table.seed},
              {"edge_probability", table.edge_probability},
              {"model", table.model},
              {"rows", std::move(rows)}};
}

void write_cv_report_csv(std::ostream& out, const CvReport& report) {
  out << "value,mean_error,evaluated_repeats,selected\n";
  for (std::size_t p = 0; p < report.grid.size(); ++p) {
    out << format_double(report.grid[p]) << ',' << format_double(report.mean_error[p]) << ','
        << report.evaluated_repeats[p] << ',' << (p == report.selected_index ? 1 : 0) << '\n';
  }
}

Json cv_report_to_json(const CvReport& report) {
  Json errors = Json::array();
  for (double e : report.mean_error) errors.push_back(number_or_null(e));
  return Json{{"estimator", std::string(to_string(report.estimator))},
              {"criterion", std::string(to_string(report.criterion))},
              {"grid", report.grid},
              {"mean_error", std::move(errors)},
              {"evaluated_repeats", report.evaluated_repeats},
              {"selected_index", report.selected_index},
              {"selected", report.selected},
              {"skipped_repeats", report.skipped_repeats},
              {"warnings", report.warnings}};
}

void write_item_map_csv(std::ostream& out, const std::vector<std::string>& items) {
  out << "index,id\n";
  for (std::size_t i = 0; i < items.size(); ++i) out << i << ',' << items[i] << '\n';
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

ObservationSet read_observations_file(const std::filesystem::path& path) {
  try {
    if (path.extension() == ".csv") {
      std::istringstream in(read_text_file(path));
      return read_observations_csv(in);
    }
    return observations_from_json(read_json_file(path));
  } catch (const IoError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw IoError(path.string() + ": " + msg);
  }
}

}  // namespace dynsync
