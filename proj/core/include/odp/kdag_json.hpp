#pragma once

#include <string>
#include <string_view>

#include "odp/kdag.hpp"

namespace odp {

// Graph file format:
//   { "k": int, "vertices": [...], "source": id, "sinks": [ids],
//     "multiedges": [{"from": id, "targets": [ids]}] }
// Vertex ids may be JSON strings or integers; integers are kept as their
// decimal spelling.

RawGraph raw_graph_from_json(std::string_view text);
std::string raw_graph_to_json(const RawGraph& raw, int indent = -1);

RawGraph load_raw_graph(const std::string& path);

/// 64-bit FNV-1a of the compact JSON serialization; keys caches.
std::uint64_t kdag_content_hash(const KDag& dag);

}  // namespace odp
