#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynsync/graph_sequence.hpp"

namespace dynsync {

// A rating (counterpart empty) or one side of a match: `item` scored `score`
// against `counterpart` during `time_unit`.
struct ScoreRecord {
  int time_unit = 0;
  std::string item;
  std::optional<std::string> counterpart;
  double score = 0.0;
};

enum class RecordKind { Ratings, Matches };

// Contiguous, disjoint windows of raw time units; window k becomes step k.
struct MergePlan {
  std::vector<std::pair<int, int>> groups;  // inclusive [first, last] unit
  std::vector<bool> connected;              // comparison graph of the window is connected
  std::vector<std::string> warnings;

  int windows() const noexcept { return static_cast<int>(groups.size()); }
  int window_of(int unit) const;  // -1 when uncovered
  // Groups cover [first, last] contiguously without overlap.
  bool is_partition_of(int first, int last) const;
};

// Dense 0-based ids in first-appearance order.
class ItemIndex {
 public:
  int intern(const std::string& id);
  std::optional<int> find(const std::string& id) const;
  const std::vector<std::string>& names() const noexcept { return names_; }
  int size() const noexcept { return static_cast<int>(names_.size()); }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> names_;
};

ItemIndex index_items(const std::vector<ScoreRecord>& records);

// Greedy: open a window, append successive units until the window's
// comparison graph over all items in `records` is connected, then close it.
// Trailing units without records (up to `last_unit` when it extends past the
// data) fold into the previous window; an unconnected final window is kept and
// flagged.
MergePlan plan_merge_until_connected(const std::vector<ScoreRecord>& records, RecordKind mode = RecordKind::Ratings,
                                     std::optional<int> last_unit = std::nullopt);

// Windows of `width` consecutive units starting at the earliest unit.
MergePlan plan_fixed_windows(const std::vector<ScoreRecord>& records, int width, RecordKind mode);

struct IngestResult {
  ObservationSet observations;
  std::vector<std::string> items;  // dense index -> original id
  std::vector<bool> step_connected;
  bool union_connected = false;
};

// y_ij = s_i - s_j with s_i the mean score of item i over the window; an edge
// joins every pair of items scored in the window.
IngestResult build_observations_ratings(const std::vector<ScoreRecord>& records, const MergePlan& plan);

// Per season t, d_ij(t) = (mean goals of i against j) - (mean goals of j
// against i); y_ij is the mean of d_ij(t) over the seasons of the window in
// which i and j met.
IngestResult build_observations_matches(const std::vector<ScoreRecord>& records, const MergePlan& plan);

// Keep records of the `count` items with the most records (ties by first appearance).
std::vector<ScoreRecord> select_top_items(const std::vector<ScoreRecord>& records, int count);

// Months since year 0 for "YYYY-MM-DD" or "YYYY-MM" (UTC calendar).
int month_index(std::string_view date);

// CSV readers. Ratings header: date,item,user,score. Matches header:
// season,home,away,home_goals,away_goals (each match yields two records).
std::vector<ScoreRecord> read_ratings_csv(std::istream& in);
std::vector<ScoreRecord> read_matches_csv(std::istream& in);

}  // namespace dynsync
