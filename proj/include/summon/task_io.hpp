#pragma once

#include "summon/task.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace summon {

using Json = nlohmann::ordered_json;

/// Coordinates are written as integers, "p/q" strings (exact) or numbers.
Json point_to_json(const SpacetimePoint& p);
SpacetimePoint point_from_json(const Json& j, const std::string& where);

/// Task file format:
///   {"dimension": D, "start": point,
///    "inputs": [{"point": point, "cardinality": n}, ...],
///    "returns": [point, ...],
///    "map": [{"m": [...], "returns": [1-based indices]}, ...],
///    "forbidden": [[...], ...],
///    "causal_tolerance": eps}                      (last two optional)
/// Structural errors throw ParseError naming the offending JSON location.
/// Semantic problems (out-of-range keys, duplicate rows) are kept in
/// load_problems for validate().
SummoningTask task_from_json(const Json& j);
Json task_to_json(const SummoningTask& task);

SummoningTask load_task(const std::filesystem::path& path);
void save_task(const SummoningTask& task, const std::filesystem::path& path);

/// Canonical serialization: two-space indent and a trailing newline.
std::string dump_task(const SummoningTask& task);

Json assignment_to_json(const Assignment& m);
/// Return sets are written 1-based.
Json return_set_to_json(const ReturnSet& set);

}  // namespace summon
