#include "odp/kdag.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace odp {

bool ValidationReport::has(std::string_view rule) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

std::string ValidationReport::summary() const {
  if (ok) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i) os << "; ";
    os << v.rule << " at " << v.where << ": " << v.message;
  }
  return os.str();
}

ValidationFailed::ValidationFailed(ValidationReport report)
    : InvalidArgument("invalid k-DAG: " + report.summary()), report_(std::move(report)) {}

EnumerationCapExceeded::EnumerationCapExceeded(std::size_t cap)
    : Error("multipath enumeration exceeded cap of " + std::to_string(cap)),
      lower_bound_(cap + 1) {}

namespace {

constexpr VertexId kNone = std::numeric_limits<VertexId>::max();

void add(ValidationReport& r, std::string rule, std::string where, std::string msg) {
  r.ok = false;
  r.violations.push_back({std::move(rule), std::move(where), std::move(msg)});
}

std::string multiedge_label(std::size_t i) { return "multiedge #" + std::to_string(i); }

}  // namespace

ValidationReport validate_kdag(const RawGraph& raw) {
  ValidationReport report;

  if (raw.k < 1) add(report, "k-positive", "graph", "k must be >= 1, got " + std::to_string(raw.k));
  if (raw.vertices.empty()) {
    add(report, "empty-graph", "graph", "no vertices declared");
    return report;
  }

  std::unordered_map<std::string, VertexId> index;
  for (std::size_t i = 0; i < raw.vertices.size(); ++i) {
    if (!index.emplace(raw.vertices[i], static_cast<VertexId>(i)).second)
      add(report, "duplicate-vertex", raw.vertices[i], "vertex declared more than once");
  }
  auto lookup = [&](const std::string& name, const std::string& where) -> VertexId {
    auto it = index.find(name);
    if (it == index.end()) {
      add(report, "unknown-vertex", where, "reference to undeclared vertex '" + name + "'");
      return kNone;
    }
    return it->second;
  };

  const std::size_t n = raw.vertices.size();
  const VertexId source = lookup(raw.source, "source");
  std::vector<char> is_sink(n, 0);
  if (raw.sinks.empty()) add(report, "no-sinks", "graph", "sink set is empty");
  for (const auto& s : raw.sinks) {
    VertexId v = lookup(s, "sinks");
    if (v == kNone) continue;
    if (is_sink[v]) add(report, "duplicate-sink", s, "sink listed more than once");
    is_sink[v] = 1;
  }
  if (source != kNone && is_sink[source])
    add(report, "source-is-sink", raw.source, "the source cannot be a sink");

  std::vector<std::size_t> out_count(n, 0), in_count(n, 0);
  std::vector<std::vector<VertexId>> succ(n);
  for (std::size_t i = 0; i < raw.multiedges.size(); ++i) {
    const auto& me = raw.multiedges[i];
    VertexId from = lookup(me.from, multiedge_label(i));
    if (raw.k >= 1 && me.targets.size() != static_cast<std::size_t>(raw.k)) {
      add(report, "multiedge-size", multiedge_label(i),
          "has " + std::to_string(me.targets.size()) + " targets, expected k = " +
              std::to_string(raw.k));
    }
    for (const auto& t : me.targets) {
      VertexId to = lookup(t, multiedge_label(i));
      if (from == kNone || to == kNone) continue;
      ++out_count[from];
      ++in_count[to];
      succ[from].push_back(to);
    }
  }

  for (std::size_t v = 0; v < n; ++v) {
    const std::string& name = raw.vertices[v];
    if (raw.k >= 1 && out_count[v] % static_cast<std::size_t>(raw.k) != 0) {
      add(report, "multiedge-partition", name,
          "multiedge partition impossible: " + std::to_string(out_count[v]) +
              " outgoing edges are not divisible by k = " + std::to_string(raw.k));
    }
    if (is_sink[v] && out_count[v] > 0)
      add(report, "sink-has-outgoing", name, "sinks must have no outgoing edges");
    if (!is_sink[v] && out_count[v] == 0)
      add(report, "nonsink-without-multiedge", name,
          "vertex has no outgoing multiedge but is not a sink");
  }
  if (source != kNone && in_count[source] > 0)
    add(report, "source-has-incoming", raw.source, "the source must have no incoming edges");

  // Acyclicity (Kahn over all vertices).
  {
    std::vector<std::size_t> indeg = in_count;
    std::deque<VertexId> queue;
    for (std::size_t v = 0; v < n; ++v)
      if (indeg[v] == 0) queue.push_back(static_cast<VertexId>(v));
    std::size_t seen = 0;
    while (!queue.empty()) {
      VertexId v = queue.front();
      queue.pop_front();
      ++seen;
      for (VertexId u : succ[v])
        if (--indeg[u] == 0) queue.push_back(u);
    }
    if (seen != n) {
      for (std::size_t v = 0; v < n; ++v)
        if (indeg[v] > 0) {
          add(report, "cycle", raw.vertices[v], "vertex lies on or after a directed cycle");
          break;
        }
    }
  }

  // Reachability from the source, and co-reachability of some sink.
  if (source != kNone) {
    std::vector<char> reach(n, 0);
    std::vector<VertexId> stack{source};
    reach[source] = 1;
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (VertexId u : succ[v])
        if (!reach[u]) {
          reach[u] = 1;
          stack.push_back(u);
        }
    }
    for (std::size_t v = 0; v < n; ++v)
      if (!reach[v])
        add(report, "unreachable", raw.vertices[v], "vertex is not reachable from the source");
  }
  {
    std::vector<std::vector<VertexId>> pred(n);
    for (std::size_t v = 0; v < n; ++v)
      for (VertexId u : succ[v]) pred[u].push_back(static_cast<VertexId>(v));
    std::vector<char> coreach(n, 0);
    std::vector<VertexId> stack;
    for (std::size_t v = 0; v < n; ++v)
      if (is_sink[v]) {
        coreach[v] = 1;
        stack.push_back(static_cast<VertexId>(v));
      }
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (VertexId u : pred[v])
        if (!coreach[u]) {
          coreach[u] = 1;
          stack.push_back(u);
        }
    }
    for (std::size_t v = 0; v < n; ++v)
      if (!coreach[v])
        add(report, "no-sink-reachable", raw.vertices[v], "vertex does not reach any sink");
  }
  return report;
}

KDag KDag::build(const RawGraph& raw) {
  ValidationReport report = validate_kdag(raw);
  if (!report.ok) throw ValidationFailed(std::move(report));

  KDag g;
  g.k_ = static_cast<int>(raw.k);
  g.names_ = raw.vertices;
  const std::size_t n = raw.vertices.size();
  for (std::size_t i = 0; i < n; ++i) g.index_.emplace(raw.vertices[i], static_cast<VertexId>(i));
  g.source_ = g.index_.at(raw.source);
  g.is_sink_.assign(n, 0);
  for (const auto& s : raw.sinks) g.is_sink_[g.index_.at(s)] = 1;
  for (std::size_t v = 0; v < n; ++v)
    if (g.is_sink_[v]) g.sinks_.push_back(static_cast<VertexId>(v));

  const std::size_t nm = raw.multiedges.size();
  g.multiedge_from_.resize(nm);
  g.edge_to_.reserve(nm * static_cast<std::size_t>(g.k_));
  for (std::size_t m = 0; m < nm; ++m) {
    g.multiedge_from_[m] = g.index_.at(raw.multiedges[m].from);
    for (const auto& t : raw.multiedges[m].targets) g.edge_to_.push_back(g.index_.at(t));
  }

  g.out_offset_.assign(n + 1, 0);
  for (VertexId from : g.multiedge_from_) ++g.out_offset_[from + 1];
  std::partial_sum(g.out_offset_.begin(), g.out_offset_.end(), g.out_offset_.begin());
  g.out_.resize(nm);
  {
    std::vector<std::size_t> cursor(g.out_offset_.begin(), g.out_offset_.end() - 1);
    for (std::size_t m = 0; m < nm; ++m)
      g.out_[cursor[g.multiedge_from_[m]]++] = static_cast<MultiedgeId>(m);
  }

  g.in_offset_.assign(n + 1, 0);
  for (VertexId to : g.edge_to_) ++g.in_offset_[to + 1];
  std::partial_sum(g.in_offset_.begin(), g.in_offset_.end(), g.in_offset_.begin());
  g.in_.resize(g.edge_to_.size());
  {
    std::vector<std::size_t> cursor(g.in_offset_.begin(), g.in_offset_.end() - 1);
    for (std::size_t e = 0; e < g.edge_to_.size(); ++e)
      g.in_[cursor[g.edge_to_[e]]++] = static_cast<EdgeId>(e);
  }

  // Every vertex is reachable from the source, so Kahn from the source alone
  // visits everything and puts the source first.
  std::vector<std::size_t> indeg(n);
  for (std::size_t v = 0; v < n; ++v) indeg[v] = g.in_offset_[v + 1] - g.in_offset_[v];
  std::deque<VertexId> queue{g.source_};
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop_front();
    g.topo_.push_back(v);
    for (MultiedgeId m : g.out_multiedges(v))
      for (VertexId u : g.multiedge_targets(m))
        if (--indeg[u] == 0) queue.push_back(u);
  }
  g.topo_rank_.assign(n, 0);
  for (std::size_t i = 0; i < g.topo_.size(); ++i) g.topo_rank_[g.topo_[i]] = i;
  return g;
}

std::optional<VertexId> KDag::find_vertex(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RawGraph KDag::to_raw() const {
  RawGraph raw;
  raw.k = k_;
  raw.vertices = names_;
  raw.source = names_[source_];
  for (VertexId s : sinks_) raw.sinks.push_back(names_[s]);
  raw.multiedges.reserve(num_multiedges());
  for (MultiedgeId m = 0; m < num_multiedges(); ++m) {
    RawMultiedge me;
    me.from = names_[multiedge_from_[m]];
    for (VertexId t : multiedge_targets(m)) me.targets.push_back(names_[t]);
    raw.multiedges.push_back(std::move(me));
  }
  return raw;
}

// ---------------------------------------------------------------------------

bool Multipath::is_bit_vector() const {
  return std::all_of(counts.begin(), counts.end(), [](std::uint32_t c) { return c <= 1; });
}

bool is_multipath(const KDag& dag, const Multipath& pi, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (pi.counts.size() != dag.num_edges()) return fail("count vector has wrong dimension");
  const auto k = static_cast<std::uint64_t>(dag.k());
  for (MultiedgeId m = 0; m < dag.num_multiedges(); ++m) {
    const std::uint32_t c = pi.counts[dag.first_edge(m)];
    for (int j = 1; j < dag.k(); ++j)
      if (pi.counts[dag.first_edge(m) + j] != c)
        return fail("unequal counts inside multiedge #" + std::to_string(m));
  }
  for (VertexId v = 0; v < dag.num_vertices(); ++v) {
    std::uint64_t in = 0, out = 0;
    for (EdgeId e : dag.in_edges(v)) in += pi.counts[e];
    for (MultiedgeId m : dag.out_multiedges(v))
      for (int j = 0; j < dag.k(); ++j) out += pi.counts[dag.first_edge(m) + j];
    if (v == dag.source()) {
      if (out != k) return fail("source outflow is " + std::to_string(out) + ", expected k");
    } else if (!dag.is_sink(v) && out != k * in) {
      return fail("outflow != k * inflow at vertex " + dag.vertex_name(v));
    }
  }
  return true;
}

std::vector<std::uint64_t> multipath_vertex_draws(const KDag& dag, const Multipath& pi) {
  std::vector<std::uint64_t> draws(dag.num_vertices(), 0);
  for (VertexId v = 0; v < dag.num_vertices(); ++v) {
    if (v == dag.source()) {
      for (MultiedgeId m : dag.out_multiedges(v)) draws[v] += pi.multiedge_count(dag, m);
    } else {
      for (EdgeId e : dag.in_edges(v)) draws[v] += pi.counts[e];
    }
  }
  return draws;
}

double derivation_multiplicity(const KDag& dag, const Multipath& pi) {
  const auto draws = multipath_vertex_draws(dag, pi);
  double log_mult = 0.0;
  for (VertexId v = 0; v < dag.num_vertices(); ++v) {
    if (dag.is_sink(v) || draws[v] <= 1) continue;
    log_mult += std::lgamma(static_cast<double>(draws[v]) + 1.0);
    for (MultiedgeId m : dag.out_multiedges(v))
      log_mult -= std::lgamma(static_cast<double>(pi.multiedge_count(dag, m)) + 1.0);
  }
  return std::round(std::exp(log_mult));
}

double multipath_loss(const Multipath& pi, std::span<const double> edge_losses) {
  if (pi.counts.size() != edge_losses.size())
    throw InvalidArgument("multipath_loss: dimension mismatch");
  double total = 0.0;
  for (std::size_t e = 0; e < edge_losses.size(); ++e)
    if (pi.counts[e]) total += static_cast<double>(pi.counts[e]) * edge_losses[e];
  return total;
}

std::uint64_t multipath_hash(const Multipath& pi) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint32_t c : pi.counts) {
    for (int b = 0; b < 4; ++b) {
      h ^= (c >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

// ---------------------------------------------------------------------------

MultipathCount count_multipaths(const KDag& dag) {
  const std::size_t n = dag.num_vertices();
  std::vector<std::uint64_t> z(n, 0);
  std::vector<char> overflow(n, 0);
  std::vector<double> log_z(n, 0.0);

  const auto order = dag.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId v = *it;
    if (dag.is_sink(v)) {
      z[v] = 1;
      continue;
    }
    std::uint64_t sum = 0;
    bool sum_over = false;
    double log_sum = -std::numeric_limits<double>::infinity();
    for (MultiedgeId m : dag.out_multiedges(v)) {
      std::uint64_t prod = 1;
      bool prod_over = false;
      double log_prod = 0.0;
      for (VertexId u : dag.multiedge_targets(m)) {
        log_prod += log_z[u];
        prod_over = prod_over || overflow[u] || __builtin_mul_overflow(prod, z[u], &prod);
      }
      sum_over = sum_over || prod_over || __builtin_add_overflow(sum, prod, &sum);
      const double hi = std::max(log_sum, log_prod);
      log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(log_prod - hi));
    }
    z[v] = sum;
    overflow[v] = sum_over;
    log_z[v] = log_sum;
  }

  MultipathCount result;
  result.log_count = log_z[dag.source()];
  if (!overflow[dag.source()]) result.exact = z[dag.source()];
  return result;
}

std::vector<Multipath> enumerate_multipaths(const KDag& dag, std::size_t cap) {
  std::vector<Multipath> out;
  const auto order = dag.topo_order();
  const int k = dag.k();
  Multipath current{std::vector<std::uint32_t>(dag.num_edges(), 0)};
  std::vector<std::uint32_t> draws(dag.num_vertices(), 0);
  draws[dag.source()] = 1;

  // Walk the topological order; at each reached non-sink vertex distribute
  // its draws over the outgoing multiedges (a multiset, visited in lexicographic
  // order of the sorted choice sequence).
  std::function<void(std::size_t)> at_vertex;
  std::function<void(std::size_t, std::span<const MultiedgeId>, std::size_t, std::uint32_t)>
      distribute;

  auto apply = [&](MultiedgeId m, std::int64_t times) {
    for (int j = 0; j < k; ++j) {
      const EdgeId e = dag.first_edge(m) + static_cast<EdgeId>(j);
      current.counts[e] = static_cast<std::uint32_t>(current.counts[e] + times);
      const VertexId u = dag.edge_to(e);
      draws[u] = static_cast<std::uint32_t>(draws[u] + times);
    }
  };

  at_vertex = [&](std::size_t pos) {
    while (pos < order.size() && (draws[order[pos]] == 0 || dag.is_sink(order[pos]))) ++pos;
    if (pos == order.size()) {
      if (out.size() >= cap) throw EnumerationCapExceeded(cap);
      out.push_back(current);
      return;
    }
    const VertexId v = order[pos];
    distribute(pos, dag.out_multiedges(v), 0, draws[v]);
  };

  distribute = [&](std::size_t pos, std::span<const MultiedgeId> ms, std::size_t i,
                   std::uint32_t remaining) {
    if (i + 1 == ms.size()) {
      apply(ms[i], remaining);
      at_vertex(pos + 1);
      apply(ms[i], -static_cast<std::int64_t>(remaining));
      return;
    }
    for (std::uint32_t take = remaining + 1; take-- > 0;) {
      apply(ms[i], take);
      distribute(pos, ms, i + 1, remaining - take);
      apply(ms[i], -static_cast<std::int64_t>(take));
    }
  };

  at_vertex(0);
  return out;
}

}  // namespace odp
