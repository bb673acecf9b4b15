#include "summon/task_io.hpp"

#include "summon/errors.hpp"

#include <fstream>
#include <sstream>

namespace summon {

namespace {

Json coordinate_to_json(const Coordinate& c) {
  if (c.is_exact()) {
    const Rational& r = c.rational();
    if (boost::multiprecision::denominator(r) == 1) {
      const auto num = boost::multiprecision::numerator(r);
      if (num >= std::numeric_limits<std::int64_t>::min() && num <= std::numeric_limits<std::int64_t>::max()) {
        return Json(static_cast<std::int64_t>(num));
      }
    }
    return Json(c.to_string());
  }
  return Json(c.value());
}

Coordinate coordinate_from_json(const Json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Coordinate(Rational(j.get<std::int64_t>()));
    if (j.is_number_float()) return Coordinate(j.get<double>());
    if (j.is_string()) return Coordinate::parse(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ": coordinate must be a number or a rational string");
}

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field \"" + key + "\"");
  return *it;
}

const Json& require_array(const Json& j, const char* key, const std::string& where) {
  const Json& value = require(j, key, where);
  if (!value.is_array()) throw ParseError(where + "/" + key + ": expected an array");
  return value;
}

std::vector<int> int_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number_integer()) throw ParseError(where + "/" + std::to_string(k) + ": expected an integer");
    out.push_back(j[k].get<int>());
  }
  return out;
}

std::string describe(const std::vector<int>& m) {
  std::string s = "(";
  for (std::size_t k = 0; k < m.size(); ++k) s += (k ? "," : "") + std::to_string(m[k]);
  return s + ")";
}

}  // namespace

Json point_to_json(const SpacetimePoint& p) {
  Json j;
  j["t"] = coordinate_to_json(p.t);
  Json xs = Json::array();
  for (const auto& c : p.x) xs.push_back(coordinate_to_json(c));
  j["x"] = std::move(xs);
  return j;
}

SpacetimePoint point_from_json(const Json& j, const std::string& where) {
  SpacetimePoint p;
  p.t = coordinate_from_json(require(j, "t", where), where + "/t");
  const Json& xs = require_array(j, "x", where);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    p.x.push_back(coordinate_from_json(xs[k], where + "/x/" + std::to_string(k)));
  }
  return p;
}

SummoningTask task_from_json(const Json& j) {
  SummoningTask task;
  const Json& dim = require(j, "dimension", "");
  if (!dim.is_number_integer() || dim.get<std::int64_t>() < 1) {
    throw ParseError("/dimension: expected a positive integer");
  }
  task.dimension = dim.get<std::size_t>();
  task.start = point_from_json(require(j, "start", ""), "/start");

  const Json& inputs = require_array(j, "inputs", "");
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    std::string where = "/inputs/" + std::to_string(k);
    InputPoint in;
    in.point = point_from_json(require(inputs[k], "point", where), where + "/point");
    const Json& n = require(inputs[k], "cardinality", where);
    if (!n.is_number_integer()) throw ParseError(where + "/cardinality: expected an integer");
    in.cardinality = n.get<int>();
    task.inputs.push_back(std::move(in));
  }

  const Json& returns = require_array(j, "returns", "");
  for (std::size_t k = 0; k < returns.size(); ++k) {
    task.returns.push_back(point_from_json(returns[k], "/returns/" + std::to_string(k)));
  }

  if (auto it = j.find("causal_tolerance"); it != j.end()) {
    if (!it->is_number() || it->get<double>() < 0) {
      throw ParseError("/causal_tolerance: expected a non-negative number");
    }
    task.causal_tolerance = it->get<double>();
  }

  // Cardinalities below 1 make the table meaningless; validate() reports them.
  bool degenerate = false;
  for (const auto& in : task.inputs) degenerate = degenerate || in.cardinality < 1;
  if (degenerate) return task;
  try {
    reset_map(task);
  } catch (const CapacityExceeded& e) {
    throw ParseError(std::string("/inputs: ") + e.what());
  }
  AssignmentSpace space = task.space();

  const Json& rows = require_array(j, "map", "");
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::string where = "/map/" + std::to_string(k);
    std::vector<int> m = int_list(require(rows[k], "m", where), where + "/m");
    std::vector<int> ret = int_list(require(rows[k], "returns", where), where + "/returns");
    if (!space.in_range(m)) {
      task.load_problems.push_back(where + ": assignment " + describe(m) + " is outside the input ranges");
      continue;
    }
    std::size_t index = space.index_of(m);
    if (task.map.has(index)) {
      task.load_problems.push_back(where + ": duplicate row for assignment " + describe(m));
      continue;
    }
    ReturnSet set;
    for (int r : ret) {
      if (r < 1) {
        task.load_problems.push_back(where + ": return indices are 1-based, got " + std::to_string(r));
        continue;
      }
      set.push_back(static_cast<std::size_t>(r - 1));
    }
    task.map.set(index, std::move(set));
  }

  if (auto it = j.find("forbidden"); it != j.end()) {
    if (!it->is_array()) throw ParseError("/forbidden: expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      std::string where = "/forbidden/" + std::to_string(k);
      std::vector<int> m = int_list((*it)[k], where);
      if (!space.in_range(m)) {
        task.load_problems.push_back(where + ": assignment " + describe(m) + " is outside the input ranges");
        continue;
      }
      forbid(task, m);
    }
  }
  return task;
}

Json assignment_to_json(const Assignment& m) {
  Json j = Json::array();
  for (int v : m) j.push_back(v);
  return j;
}

Json return_set_to_json(const ReturnSet& set) {
  Json j = Json::array();
  for (std::size_t r : set) j.push_back(r + 1);
  return j;
}

Json task_to_json(const SummoningTask& task) {
  Json j;
  j["dimension"] = task.dimension;
  j["start"] = point_to_json(task.start);
  Json inputs = Json::array();
  for (const auto& in : task.inputs) {
    Json e;
    e["point"] = point_to_json(in.point);
    e["cardinality"] = in.cardinality;
    inputs.push_back(std::move(e));
  }
  j["inputs"] = std::move(inputs);
  Json returns = Json::array();
  for (const auto& q : task.returns) returns.push_back(point_to_json(q));
  j["returns"] = std::move(returns);

  AssignmentSpace space = task.space();
  Json rows = Json::array();
  for (std::size_t index = 0; index < task.map.size(); ++index) {
    const auto& row = task.map.row(index);
    if (!row) continue;
    Json e;
    e["m"] = assignment_to_json(space.at(index));
    e["returns"] = return_set_to_json(*row);
    rows.push_back(std::move(e));
  }
  j["map"] = std::move(rows);

  if (task.is_constrained()) {
    Json forbidden = Json::array();
    for (std::size_t index = 0; index < task.forbidden.size(); ++index) {
      if (task.forbidden[index]) forbidden.push_back(assignment_to_json(space.at(index)));
    }
    j["forbidden"] = std::move(forbidden);
  }
  if (task.causal_tolerance != 0.0) j["causal_tolerance"] = task.causal_tolerance;
  return j;
}

SummoningTask load_task(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return task_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string dump_task(const SummoningTask& task) { return task_to_json(task).dump(2) + "\n"; }

void save_task(const SummoningTask& task, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot write file");
  out << dump_task(task);
}

}  // namespace summon
