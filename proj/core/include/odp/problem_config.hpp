#pragma once

#include <string>
#include <string_view>

#include "odp/problems.hpp"

namespace odp {

/// Builds a problem from {"problem": name, "params": {...}}:
///   bst           {"n": 5}
///   matrix_chain  {"n": 4, "d_max": 10}
///   knapsack      {"capacity": 7, "heaviness": [2, 3, 4]}
///   rod           {"n": 4}
///   wis           {"intervals": [[0, 2], [1, 4], ...]}
ProblemInstance problem_from_json(std::string_view text);
ProblemInstance load_problem(const std::string& path);

}  // namespace odp
