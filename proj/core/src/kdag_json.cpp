#include "odp/kdag_json.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace odp {

using nlohmann::json;

namespace {

std::string id_from_json(const json& j, const char* field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  throw InvalidArgument(std::string("graph JSON: ") + field + " ids must be strings or integers");
}

bool is_canonical_int(const std::string& s) {
  if (s.empty() || s.size() > 18) return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  if (s[i] == '0' && s.size() > i + 1) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return !(s == "-0");
}

json id_to_json(const std::string& s) {
  if (is_canonical_int(s)) return std::stoll(s);
  return s;
}

}  // namespace

RawGraph raw_graph_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("graph JSON: ") + e.what());
  }
  for (const char* field : {"k", "vertices", "source", "sinks", "multiedges"})
    if (!j.contains(field)) throw InvalidArgument(std::string("graph JSON: missing field '") + field + "'");
  if (!j["k"].is_number_integer()) throw InvalidArgument("graph JSON: k must be an integer");

  RawGraph raw;
  raw.k = j["k"].get<std::int64_t>();
  for (const auto& v : j["vertices"]) raw.vertices.push_back(id_from_json(v, "vertices"));
  raw.source = id_from_json(j["source"], "source");
  for (const auto& s : j["sinks"]) raw.sinks.push_back(id_from_json(s, "sinks"));
  for (const auto& m : j["multiedges"]) {
    if (!m.contains("from") || !m.contains("targets"))
      throw InvalidArgument("graph JSON: multiedge needs 'from' and 'targets'");
    RawMultiedge me;
    me.from = id_from_json(m["from"], "from");
    for (const auto& t : m["targets"]) me.targets.push_back(id_from_json(t, "targets"));
    raw.multiedges.push_back(std::move(me));
  }
  return raw;
}

std::string raw_graph_to_json(const RawGraph& raw, int indent) {
  json j;
  j["k"] = raw.k;
  j["vertices"] = json::array();
  for (const auto& v : raw.vertices) j["vertices"].push_back(id_to_json(v));
  j["source"] = id_to_json(raw.source);
  j["sinks"] = json::array();
  for (const auto& s : raw.sinks) j["sinks"].push_back(id_to_json(s));
  j["multiedges"] = json::array();
  for (const auto& me : raw.multiedges) {
    json targets = json::array();
    for (const auto& t : me.targets) targets.push_back(id_to_json(t));
    j["multiedges"].push_back({{"from", id_to_json(me.from)}, {"targets", std::move(targets)}});
  }
  return j.dump(indent);
}

RawGraph load_raw_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open graph file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return raw_graph_from_json(ss.str());
}

std::uint64_t kdag_content_hash(const KDag& dag) {
  const std::string text = raw_graph_to_json(dag.to_raw());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace odp
