#include "odp/problem_config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "odp/error.hpp"

namespace odp {

using nlohmann::json;

namespace {

const json& require(const json& params, const char* key, const std::string& problem) {
  if (!params.contains(key))
    throw InvalidArgument("problem config: " + problem + " needs params." + key);
  return params.at(key);
}

int require_int(const json& params, const char* key, const std::string& problem) {
  const json& v = require(params, key, problem);
  if (!v.is_number_integer())
    throw InvalidArgument("problem config: params." + std::string(key) + " must be an integer");
  return v.get<int>();
}

}  // namespace

ProblemInstance problem_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("problem config: ") + e.what());
  }
  if (!j.is_object() || !j.contains("problem") || !j["problem"].is_string())
    throw InvalidArgument("problem config: expected {\"problem\": ..., \"params\": {...}}");
  const std::string name = j["problem"].get<std::string>();
  const json params = j.value("params", json::object());
  if (!params.is_object()) throw InvalidArgument("problem config: params must be an object");

  try {
    if (name == "bst") return make_problem(build_bst({require_int(params, "n", name)}));
    if (name == "matrix_chain") {
      const json& d = require(params, "d_max", name);
      if (!d.is_number()) throw InvalidArgument("problem config: params.d_max must be a number");
      return make_problem(build_matrix_chain({require_int(params, "n", name), d.get<double>()}));
    }
    if (name == "knapsack") {
      KnapsackInstance inst;
      inst.capacity = require_int(params, "capacity", name);
      inst.heaviness = require(params, "heaviness", name).get<std::vector<int>>();
      return make_problem(build_knapsack(inst));
    }
    if (name == "rod") return make_problem(build_rod({require_int(params, "n", name)}));
    if (name == "wis") {
      WisInstance inst;
      for (const auto& iv : require(params, "intervals", name)) {
        if (!iv.is_array() || iv.size() != 2)
          throw InvalidArgument("problem config: each interval is [start, end]");
        inst.intervals.push_back({iv[0].get<double>(), iv[1].get<double>()});
      }
      return make_problem(build_wis(inst));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument("problem config: " + std::string(e.what()));
  }
  throw InvalidArgument("problem config: unknown problem \"" + name + "\"");
}

ProblemInstance load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return problem_from_json(ss.str());
}

}  // namespace odp
