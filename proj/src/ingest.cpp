#include "dynsync/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>

#include "dynsync/disjoint_sets.hpp"

namespace dynsync {

int MergePlan::window_of(int unit) const {
  for (int w = 0; w < windows(); ++w) {
    if (unit >= groups[w].first && unit <= groups[w].second) return w;
  }
  return -1;
}

bool MergePlan::is_partition_of(int first, int last) const {
  if (groups.empty()) return false;
  if (groups.front().first != first || groups.back().second != last) return false;
  for (std::size_t w = 0; w < groups.size(); ++w) {
    if (groups[w].first > groups[w].second) return false;
    if (w > 0 && groups[w].first != groups[w - 1].second + 1) return false;
  }
  return true;
}

int ItemIndex::intern(const std::string& id) {
  auto [it, inserted] = ids_.try_emplace(id, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(id);
  return it->second;
}

std::optional<int> ItemIndex::find(const std::string& id) const {
  auto it = ids_.find(id);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

ItemIndex index_items(const std::vector<ScoreRecord>& records) {
  ItemIndex index;
  for (const auto& r : records) {
    index.intern(r.item);
    if (r.counterpart) index.intern(*r.counterpart);
  }
  return index;
}

namespace {

std::pair<int, int> unit_range(const std::vector<ScoreRecord>& records) {
  if (records.empty()) throw PreconditionError("ingest: no records");
  int lo = records.front().time_unit, hi = lo;
  for (const auto& r : records) {
    if (r.time_unit < 0) throw InvalidArgument("ingest: negative time unit");
    if (!std::isfinite(r.score)) throw InvalidArgument("ingest: non-finite score for item " + r.item);
    lo = std::min(lo, r.time_unit);
    hi = std::max(hi, r.time_unit);
  }
  return {lo, hi};
}

// Connectivity of the comparison graph induced by the records of units
// [first, last] over every item of `index`.
class WindowGraph {
 public:
  WindowGraph(const ItemIndex& index, RecordKind mode) : index_(index), mode_(mode), sets_(index.size()) {}

  void add(const ScoreRecord& r) {
    const int i = *index_.find(r.item);
    if (mode_ == RecordKind::Ratings) {
      if (anchor_ < 0) {
        anchor_ = i;
      } else {
        sets_.unite(anchor_, i);
      }
    } else if (r.counterpart) {
      sets_.unite(i, *index_.find(*r.counterpart));
    }
  }

  bool connected() const { return sets_.components() == 1; }

 private:
  const ItemIndex& index_;
  RecordKind mode_;
  DisjointSets sets_;
  int anchor_ = -1;
};

std::vector<std::vector<const ScoreRecord*>> records_by_unit(const std::vector<ScoreRecord>& records, int lo, int hi) {
  std::vector<std::vector<const ScoreRecord*>> out(hi - lo + 1);
  for (const auto& r : records) out[r.time_unit - lo].push_back(&r);
  return out;
}

std::vector<bool> window_connectivity(const std::vector<ScoreRecord>& records, const MergePlan& plan,
                                      const ItemIndex& index, RecordKind mode) {
  std::vector<WindowGraph> graphs;
  graphs.reserve(plan.windows());
  for (int w = 0; w < plan.windows(); ++w) graphs.emplace_back(index, mode);
  for (const auto& r : records) {
    const int w = plan.window_of(r.time_unit);
    if (w >= 0) graphs[w].add(r);
  }
  std::vector<bool> out;
  for (const auto& g : graphs) out.push_back(g.connected());
  return out;
}

}  // namespace

MergePlan plan_merge_until_connected(const std::vector<ScoreRecord>& records, RecordKind mode,
                                     std::optional<int> last_unit) {
  auto [lo, hi] = unit_range(records);
  if (last_unit) {
    if (*last_unit < hi) throw InvalidArgument("plan_merge_until_connected: last_unit precedes the data");
    hi = *last_unit;
  }
  const ItemIndex index = index_items(records);
  const auto by_unit = records_by_unit(records, lo, hi);

  MergePlan plan;
  int start = lo;
  std::optional<WindowGraph> current;
  current.emplace(index, mode);
  for (int unit = lo; unit <= hi; ++unit) {
    for (const auto* r : by_unit[unit - lo]) current->add(*r);
    if (current->connected()) {
      plan.groups.emplace_back(start, unit);
      plan.connected.push_back(true);
      start = unit + 1;
      current.emplace(index, mode);
    }
  }
  if (start <= hi) {
    bool any = false;
    for (int unit = start; unit <= hi; ++unit) any = any || !by_unit[unit - lo].empty();
    if (!any && !plan.groups.empty()) {
      plan.groups.back().second = hi;
    } else {
      plan.groups.emplace_back(start, hi);
      plan.connected.push_back(false);
      plan.warnings.push_back("final window [" + std::to_string(start) + ", " + std::to_string(hi) +
                              "] closed without a connected comparison graph");
    }
  }
  return plan;
}

MergePlan plan_fixed_windows(const std::vector<ScoreRecord>& records, int width, RecordKind mode) {
  if (width < 1) throw InvalidArgument("plan_fixed_windows: width must be >= 1");
  const auto [lo, hi] = unit_range(records);
  MergePlan plan;
  for (int start = lo; start <= hi; start += width) plan.groups.emplace_back(start, std::min(hi, start + width - 1));
  plan.connected = window_connectivity(records, plan, index_items(records), mode);
  return plan;
}

namespace {

void check_plan(const std::vector<ScoreRecord>& records, const MergePlan& plan) {
  if (plan.windows() < 2) throw PreconditionError("ingest: merge plan needs at least two windows (T >= 1)");
  std::vector<int> counts(plan.windows(), 0);
  for (const auto& r : records) {
    const int w = plan.window_of(r.time_unit);
    if (w < 0) throw PreconditionError("ingest: time unit " + std::to_string(r.time_unit) + " not covered by the plan");
    ++counts[w];
  }
  for (int w = 0; w < plan.windows(); ++w) {
    if (counts[w] == 0) throw PreconditionError("ingest: window " + std::to_string(w) + " has no records");
  }
}

IngestResult finish(int n, int horizon, std::vector<ObservationSet::Triple> triples, std::vector<std::string> items) {
  if (n < 2) throw PreconditionError("ingest: need at least two distinct items");
  IngestResult out;
  out.observations = ObservationSet::from_triples(n, horizon, std::move(triples));
  out.items = std::move(items);
  const auto& g = out.observations.graph();
  for (int k = 0; k < g.steps(); ++k) out.step_connected.push_back(is_connected(g, k));
  out.union_connected = union_is_connected(g);
  return out;
}

}  // namespace

IngestResult build_observations_ratings(const std::vector<ScoreRecord>& records, const MergePlan& plan) {
  check_plan(records, plan);
  const ItemIndex index = index_items(records);
  const int n = index.size();
  const int windows = plan.windows();
  std::vector<double> sum(static_cast<std::size_t>(windows) * n, 0.0);
  std::vector<int> count(static_cast<std::size_t>(windows) * n, 0);
  for (const auto& r : records) {
    const std::size_t slot = static_cast<std::size_t>(plan.window_of(r.time_unit)) * n + *index.find(r.item);
    sum[slot] += r.score;
    ++count[slot];
  }
  std::vector<ObservationSet::Triple> triples;
  for (int w = 0; w < windows; ++w) {
    std::vector<int> scored;
    std::vector<double> mean(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const std::size_t slot = static_cast<std::size_t>(w) * n + i;
      if (count[slot] > 0) {
        scored.push_back(i);
        mean[i] = sum[slot] / count[slot];
      }
    }
    for (std::size_t a = 0; a < scored.size(); ++a) {
      for (std::size_t b = a + 1; b < scored.size(); ++b) {
        const int i = scored[a], j = scored[b];
        triples.push_back({w, i, j, mean[i] - mean[j]});
      }
    }
  }
  return finish(n, windows - 1, std::move(triples), index.names());
}

IngestResult build_observations_matches(const std::vector<ScoreRecord>& records, const MergePlan& plan) {
  check_plan(records, plan);
  const ItemIndex index = index_items(records);
  const int n = index.size();
  const int windows = plan.windows();

  // (window, season, scorer, opponent) -> (goal sum, games)
  struct Tally {
    double goals = 0.0;
    int games = 0;
  };
  std::map<std::tuple<int, int, int, int>, Tally> tallies;
  for (const auto& r : records) {
    if (!r.counterpart) throw InvalidArgument("ingest: match record for " + r.item + " has no opponent");
    const int i = *index.find(r.item);
    const int j = *index.find(*r.counterpart);
    if (i == j) throw InvalidArgument("ingest: team " + r.item + " plays itself");
    auto& t = tallies[{plan.window_of(r.time_unit), r.time_unit, i, j}];
    t.goals += r.score;
    ++t.games;
  }

  // (window, i, j) with i < j -> (sum of per-season differences, seasons met)
  std::map<std::tuple<int, int, int>, std::pair<double, int>> pairs;
  for (const auto& [key, tally] : tallies) {
    const auto [w, season, i, j] = key;
    if (i > j) continue;
    auto other = tallies.find({w, season, j, i});
    if (other == tallies.end()) continue;
    const double diff = tally.goals / tally.games - other->second.goals / other->second.games;
    auto& acc = pairs[{w, i, j}];
    acc.first += diff;
    ++acc.second;
  }
  std::vector<ObservationSet::Triple> triples;
  triples.reserve(pairs.size());
  for (const auto& [key, acc] : pairs) {
    const auto [w, i, j] = key;
    triples.push_back({w, i, j, acc.first / acc.second});
  }
  return finish(n, windows - 1, std::move(triples), index.names());
}

std::vector<ScoreRecord> select_top_items(const std::vector<ScoreRecord>& records, int count) {
  if (count < 1) throw InvalidArgument("select_top_items: count must be >= 1");
  const ItemIndex index = index_items(records);
  std::vector<int> tally(index.size(), 0);
  for (const auto& r : records) ++tally[*index.find(r.item)];
  std::vector<int> order(index.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return tally[a] > tally[b]; });
  std::vector<char> keep(index.size(), 0);
  for (int r = 0; r < std::min<int>(count, static_cast<int>(order.size())); ++r) keep[order[r]] = 1;
  std::vector<ScoreRecord> out;
  for (const auto& r : records) {
    if (!keep[*index.find(r.item)]) continue;
    if (r.counterpart && !keep[*index.find(*r.counterpart)]) continue;
    out.push_back(r);
  }
  return out;
}

namespace {

int parse_int(std::string_view s, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr == s.data()) throw InvalidArgument(std::string("ingest: bad ") + what + " '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument(std::string("ingest: bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Column positions of `wanted` in the header line.
std::vector<std::size_t> header_columns(std::istream& in, const std::vector<std::string_view>& wanted) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("ingest: missing CSV header");
  const auto cols = split(line);
  std::vector<std::size_t> pos;
  for (auto name : wanted) {
    auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) throw InvalidArgument("ingest: CSV header lacks column '" + std::string(name) + "'");
    pos.push_back(static_cast<std::size_t>(it - cols.begin()));
  }
  return pos;
}

}  // namespace

int month_index(std::string_view date) {
  date = trim(date);
  if (date.size() < 7 || date[4] != '-') throw InvalidArgument("ingest: bad date '" + std::string(date) + "'");
  const int year = parse_int(date.substr(0, 4), "year");
  const int month = parse_int(date.substr(5, 2), "month");
  if (month < 1 || month > 12) throw InvalidArgument("ingest: bad month in '" + std::string(date) + "'");
  return year * 12 + (month - 1);
}

std::vector<ScoreRecord> read_ratings_csv(std::istream& in) {
  const auto pos = header_columns(in, {"date", "item", "user", "score"});
  std::vector<ScoreRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() <= *std::max_element(pos.begin(), pos.end())) throw InvalidArgument("ingest: short CSV row '" + line + "'");
    out.push_back({month_index(f[pos[0]]), std::string(f[pos[1]]), std::nullopt, parse_double(f[pos[3]], "score")});
  }
  return out;
}

std::vector<ScoreRecord> read_matches_csv(std::istream& in) {
  const auto pos = header_columns(in, {"season", "home", "away", "home_goals", "away_goals"});
  std::vector<ScoreRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() <= *std::max_element(pos.begin(), pos.end())) throw InvalidArgument("ingest: short CSV row '" + line + "'");
    const int season = parse_int(f[pos[0]], "season");
    const std::string home(f[pos[1]]), away(f[pos[2]]);
    out.push_back({season, home, away, parse_double(f[pos[3]], "home_goals")});
    out.push_back({season, away, home, parse_double(f[pos[4]], "away_goals")});
  }
  return out;
}

}  // namespace dynsync
