#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "odp/error.hpp"

namespace odp {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using MultiedgeId = std::uint32_t;

// ---------------------------------------------------------------------------
// Unvalidated description, as read from JSON or produced by a problem builder.
// ---------------------------------------------------------------------------

struct RawMultiedge {
  std::string from;
  std::vector<std::string> targets;
};

struct RawGraph {
  std::int64_t k = 0;
  std::vector<std::string> vertices;
  std::string source;
  std::vector<std::string> sinks;
  std::vector<RawMultiedge> multiedges;
};

struct Violation {
  std::string rule;   // stable identifier, e.g. "multiedge-partition"
  std::string where;  // vertex name, or "multiedge #i"
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  bool has(std::string_view rule) const;
  std::string summary() const;
};

/// Checks every k-DAG rule and reports all violations found. Never throws.
ValidationReport validate_kdag(const RawGraph& raw);

class ValidationFailed : public InvalidArgument {
 public:
  explicit ValidationFailed(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

// ---------------------------------------------------------------------------
// KDag
// ---------------------------------------------------------------------------

/// Immutable validated k-DAG.
///
/// Multiedge ids follow declaration order in the raw description. Edge ids are
/// derived from them: the edges of multiedge m are m*k .. m*k + k - 1, in the
/// order the targets were declared.
class KDag {
 public:
  /// Empty placeholder; only build() yields a usable graph.
  KDag() = default;

  /// Validates `raw` and builds the graph; throws ValidationFailed on any
  /// violation.
  static KDag build(const RawGraph& raw);

  int k() const noexcept { return k_; }
  std::size_t num_vertices() const noexcept { return names_.size(); }
  std::size_t num_edges() const noexcept { return edge_to_.size(); }
  std::size_t num_multiedges() const noexcept { return multiedge_from_.size(); }

  VertexId source() const noexcept { return source_; }
  std::span<const VertexId> sinks() const noexcept { return sinks_; }
  bool is_sink(VertexId v) const { return is_sink_[v] != 0; }

  VertexId edge_from(EdgeId e) const { return multiedge_from_[edge_multiedge(e)]; }
  VertexId edge_to(EdgeId e) const { return edge_to_[e]; }
  MultiedgeId edge_multiedge(EdgeId e) const {
    return static_cast<MultiedgeId>(e / static_cast<EdgeId>(k_));
  }

  VertexId multiedge_from(MultiedgeId m) const { return multiedge_from_[m]; }
  EdgeId first_edge(MultiedgeId m) const { return m * static_cast<EdgeId>(k_); }
  /// The k target vertices of m, in declaration order.
  std::span<const VertexId> multiedge_targets(MultiedgeId m) const {
    return {edge_to_.data() + first_edge(m), static_cast<std::size_t>(k_)};
  }

  /// Multiedges leaving v in ascending id order; empty for sinks.
  std::span<const MultiedgeId> out_multiedges(VertexId v) const {
    return {out_.data() + out_offset_[v], out_offset_[v + 1] - out_offset_[v]};
  }
  std::span<const EdgeId> in_edges(VertexId v) const {
    return {in_.data() + in_offset_[v], in_offset_[v + 1] - in_offset_[v]};
  }

  /// Topological order, source first.
  std::span<const VertexId> topo_order() const noexcept { return topo_; }
  std::size_t topo_rank(VertexId v) const { return topo_rank_[v]; }

  const std::string& vertex_name(VertexId v) const { return names_[v]; }
  std::optional<VertexId> find_vertex(std::string_view name) const;

  /// Round-trips to a description that rebuilds an identical graph.
  RawGraph to_raw() const;

 private:
  int k_ = 1;
  std::vector<std::string> names_;
  std::unordered_map<std::string, VertexId> index_;
  VertexId source_ = 0;
  std::vector<VertexId> sinks_;
  std::vector<char> is_sink_;
  std::vector<VertexId> edge_to_;
  std::vector<VertexId> multiedge_from_;
  std::vector<std::size_t> out_offset_;
  std::vector<MultiedgeId> out_;
  std::vector<std::size_t> in_offset_;
  std::vector<EdgeId> in_;
  std::vector<VertexId> topo_;
  std::vector<std::size_t> topo_rank_;
};

// ---------------------------------------------------------------------------
// Multipaths
// ---------------------------------------------------------------------------

/// Count vector over edges. Edges of one multiedge share a common count.
struct Multipath {
  std::vector<std::uint32_t> counts;

  std::uint32_t multiedge_count(const KDag& dag, MultiedgeId m) const {
    return counts[dag.first_edge(m)];
  }
  /// True when every count is 0 or 1.
  bool is_bit_vector() const;

  friend bool operator==(const Multipath&, const Multipath&) = default;
  friend auto operator<=>(const Multipath&, const Multipath&) = default;
};

/// Checks the k-multipath conditions directly on the count vector, without
/// reference to how it was generated. On failure `why` (if given) names the
/// first broken condition.
bool is_multipath(const KDag& dag, const Multipath& pi, std::string* why = nullptr);

/// Inflow per vertex; for the source this is the number of multiedges it
/// launches (always 1 for a valid multipath).
std::vector<std::uint64_t> multipath_vertex_draws(const KDag& dag, const Multipath& pi);

/// Number of ordered sampling outcomes (derivation trees) that produce `pi`:
/// the product over reached vertices of multinomial(draws; per-multiedge
/// counts). Equals 1 whenever `pi` is a bit vector.
double derivation_multiplicity(const KDag& dag, const Multipath& pi);

double multipath_loss(const Multipath& pi, std::span<const double> edge_losses);

/// FNV-1a over the counts; used to identify samples in traces.
std::uint64_t multipath_hash(const Multipath& pi);

struct MultipathCount {
  std::optional<std::uint64_t> exact;  // empty when it overflows 64 bits
  double log_count = 0.0;
};

/// Number of derivations from the source: Z_source of the weight-pushing
/// recursion with unit multiedge weights, computed in O(|E|). Coincides with
/// the number of distinct count vectors whenever all of them are bit vectors
/// (k = 1, and every builder in problems.hpp).
MultipathCount count_multipaths(const KDag& dag);

class EnumerationCapExceeded : public Error {
 public:
  EnumerationCapExceeded(std::size_t cap);
  /// Lower bound on the number of multipaths.
  std::size_t lower_bound() const noexcept { return lower_bound_; }

 private:
  std::size_t lower_bound_;
};

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// All distinct k-multipaths, each once. Order is lexicographic in the
/// multiedge choices made along topo_order, with a vertex reached f times
/// choosing a sorted multiset of f multiedges.
std::vector<Multipath> enumerate_multipaths(const KDag& dag,
                                            std::size_t cap = kDefaultEnumerationCap);

}  // namespace odp
