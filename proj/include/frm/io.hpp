// Versioned JSON file formats.
//
//   frm-problem/1   environment, foliations, witnesses, start and goal
//   frm-roadmap/1   base roadmap components and edges
//   frm-mapstate/1  experience counts of an instantiated FoliatedRepMap
//
// Loaders throw LoadError. Syntax errors report line and column; semantic
// errors report the JSON pointer of the offending value.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "frm/atlas.hpp"
#include "frm/problem.hpp"
#include "frm/repmap.hpp"

namespace frm {

inline constexpr std::string_view kProblemSchema = "frm-problem/1";
inline constexpr std::string_view kRoadmapSchema = "frm-roadmap/1";
inline constexpr std::string_view kMapStateSchema = "frm-mapstate/1";

/// Parses text, converting syntax errors into LoadError with line:column.
nlohmann::json parse_json(std::string_view text, const std::string& source);

nlohmann::json problem_to_json(const Problem& problem);
Problem problem_from_json(const nlohmann::json& doc, const std::string& source = "<problem>");

nlohmann::json roadmap_to_json(const BaseRoadmap& roadmap);
BaseRoadmap roadmap_from_json(const nlohmann::json& doc, const std::string& source = "<roadmap>");

nlohmann::json map_state_to_json(const FoliatedRepMap& map);
/// Validates the state against the map's shape before restoring it.
void map_state_from_json(const nlohmann::json& doc, FoliatedRepMap& map, const std::string& source = "<mapstate>");

nlohmann::json feedback_to_json(const PlannerFeedback& feedback);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

Problem load_problem(const std::filesystem::path& path);
void save_problem(const std::filesystem::path& path, const Problem& problem);
BaseRoadmap load_roadmap(const std::filesystem::path& path);
void save_roadmap(const std::filesystem::path& path, const BaseRoadmap& roadmap);

}  // namespace frm
