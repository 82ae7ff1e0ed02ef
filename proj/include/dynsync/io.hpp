#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dynsync/cross_validation.hpp"
#include "dynsync/experiment.hpp"
#include "dynsync/graph_sequence.hpp"

namespace dynsync {

using Json = nlohmann::ordered_json;

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

// {"n", "T", "edges": [[[i, j], ...] per step]}
Json graph_to_json(const GraphSequence& g);
GraphSequence graph_from_json(const Json& j);

// Graph fields plus "values": [[y, ...] per step], parallel to "edges".
Json observations_to_json(const ObservationSet& obs);
ObservationSet observations_from_json(const Json& j);

// Columns step,i,j,y. When n or T is not given it is inferred from the
// largest index present.
void write_observations_csv(std::ostream& out, const ObservationSet& obs);
ObservationSet read_observations_csv(std::istream& in, std::optional<int> n = std::nullopt,
                                     std::optional<int> horizon = std::nullopt);

// {"n", "T", "values": [[z_k0, ...] per step]}
Json trajectory_to_json(const StrengthTrajectory& z);
StrengthTrajectory trajectory_from_json(const Json& j);
// Columns step,item,value.
void write_trajectory_csv(std::ostream& out, const StrengthTrajectory& z);

// Columns T,estimator,parameter,mean_mse,std_mse,trials,failures,disconnected_step_trials.
void write_result_table_csv(std::ostream& out, const ResultTable& table);
Json result_table_to_json(const ResultTable& table);

// Columns value,mean_error,evaluated_repeats,selected.
void write_cv_report_csv(std::ostream& out, const CvReport& report);
Json cv_report_to_json(const CvReport& report);

// Columns index,id.
void write_item_map_csv(std::ostream& out, const std::vector<std::string>& items);

// File helpers; failures throw IoError naming the path.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Observations from .json or .csv by extension.
ObservationSet read_observations_file(const std::filesystem::path& path);

}  // namespace dynsync
