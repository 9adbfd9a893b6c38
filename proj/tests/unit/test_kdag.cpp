#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <set>

#include "fuzz.hpp"
#include "odp/kdag.hpp"
#include "odp/kdag_json.hpp"
#include "odp/problems.hpp"

using namespace odp;
using odp::testing::random_kdag;

namespace {

// s -> {a, b} or s -> {a, a'}; a -> {t1, t2}; b -> {t2, t3}.
RawGraph small_raw() {
  RawGraph raw;
  raw.k = 2;
  raw.vertices = {"s", "a", "b", "t1", "t2", "t3"};
  raw.source = "s";
  raw.sinks = {"t1", "t2", "t3"};
  raw.multiedges = {{"s", {"a", "b"}}, {"s", {"a", "t3"}}, {"a", {"t1", "t2"}}, {"b", {"t2", "t3"}}};
  return raw;
}

// Brute force: every count vector reachable by choosing, at each vertex, a
// multiset of multiedges of size equal to its inflow.
std::set<std::vector<std::uint32_t>> brute_multipaths(const KDag& dag) {
  std::set<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> counts(dag.num_edges(), 0);
  std::vector<std::uint32_t> inflow(dag.num_vertices(), 0);
  const auto order = dag.topo_order();
  std::function<void(std::size_t)> rec = [&](std::size_t idx) {
    while (idx < order.size() && (dag.is_sink(order[idx]) ||
                                  (order[idx] != dag.source() && inflow[order[idx]] == 0)))
      ++idx;
    if (idx == order.size()) {
      out.insert(counts);
      return;
    }
    const VertexId v = order[idx];
    const std::uint32_t draws = v == dag.source() ? 1 : inflow[v];
    const auto ms = dag.out_multiedges(v);
    std::function<void(std::size_t, std::uint32_t)> choose = [&](std::size_t from, std::uint32_t left) {
      if (left == 0) {
        rec(idx + 1);
        return;
      }
      for (std::size_t i = from; i < ms.size(); ++i) {
        for (int j = 0; j < dag.k(); ++j) {
          ++counts[dag.first_edge(ms[i]) + j];
          ++inflow[dag.edge_to(dag.first_edge(ms[i]) + j)];
        }
        choose(i, left - 1);
        for (int j = 0; j < dag.k(); ++j) {
          --counts[dag.first_edge(ms[i]) + j];
          --inflow[dag.edge_to(dag.first_edge(ms[i]) + j)];
        }
      }
    };
    choose(0, draws);
  };
  rec(0);
  return out;
}

}  // namespace

TEST(Validate, AcceptsSmallGraph) {
  const auto report = validate_kdag(small_raw());
  EXPECT_TRUE(report.ok) << report.summary();
}

TEST(Validate, ReportsPartitionFailureWithExplanation) {
  RawGraph raw = small_raw();
  raw.multiedges[2].targets = {"t1", "t2", "t3"};
  const auto report = validate_kdag(raw);
  EXPECT_FALSE(report.ok);
  EXPECT_TRUE(report.has("multiedge-size"));
}

TEST(Validate, EachRule) {
  struct Case {
    const char* rule;
    std::function<void(RawGraph&)> mutate;
  };
  const std::vector<Case> cases = {
      {"k-positive", [](RawGraph& r) { r.k = 0; }},
      {"duplicate-vertex", [](RawGraph& r) { r.vertices.push_back("a"); }},
      {"unknown-vertex", [](RawGraph& r) { r.multiedges[0].targets[1] = "zz"; }},
      {"no-sinks", [](RawGraph& r) { r.sinks.clear(); }},
      {"duplicate-sink", [](RawGraph& r) { r.sinks.push_back("t1"); }},
      {"source-is-sink", [](RawGraph& r) { r.sinks.push_back("s"); }},
      {"sink-has-outgoing", [](RawGraph& r) { r.multiedges.push_back({"t1", {"t2", "t3"}}); }},
      {"nonsink-without-multiedge", [](RawGraph& r) { r.vertices.push_back("c"); r.multiedges.push_back({"s", {"c", "t1"}}); }},
      {"source-has-incoming", [](RawGraph& r) { r.multiedges.push_back({"a", {"s", "t1"}}); }},
      {"cycle", [](RawGraph& r) { r.multiedges.push_back({"a", {"b", "t1"}}); r.multiedges.push_back({"b", {"a", "t1"}}); }},
      {"unreachable", [](RawGraph& r) { r.vertices.push_back("u"); r.sinks.push_back("u"); }},
  };
  for (const auto& c : cases) {
    RawGraph raw = small_raw();
    c.mutate(raw);
    const auto report = validate_kdag(raw);
    EXPECT_FALSE(report.ok) << c.rule;
    EXPECT_TRUE(report.has(c.rule)) << c.rule << ": " << report.summary();
  }
}

TEST(Validate, BuildThrowsWithReport) {
  RawGraph raw = small_raw();
  raw.k = 3;
  try {
    KDag::build(raw);
    FAIL() << "expected ValidationFailed";
  } catch (const ValidationFailed& e) {
    EXPECT_FALSE(e.report().ok);
  }
}

TEST(KDag, EdgeIdsFollowMultiedges) {
  const KDag dag = KDag::build(small_raw());
  EXPECT_EQ(dag.num_vertices(), 6u);
  EXPECT_EQ(dag.num_multiedges(), 4u);
  EXPECT_EQ(dag.num_edges(), 8u);
  for (EdgeId e = 0; e < dag.num_edges(); ++e) EXPECT_EQ(dag.edge_multiedge(e), e / 2);
  EXPECT_EQ(dag.vertex_name(dag.edge_to(3)), "t3");
  EXPECT_EQ(dag.topo_order().front(), dag.source());
  for (EdgeId e = 0; e < dag.num_edges(); ++e)
    EXPECT_LT(dag.topo_rank(dag.edge_from(e)), dag.topo_rank(dag.edge_to(e)));
}

TEST(KDag, JsonRoundTrip) {
  const KDag dag = KDag::build(small_raw());
  const std::string text = raw_graph_to_json(dag.to_raw());
  const KDag again = KDag::build(raw_graph_from_json(text));
  EXPECT_EQ(raw_graph_to_json(again.to_raw()), text);
  EXPECT_EQ(kdag_content_hash(dag), kdag_content_hash(again));
}

TEST(KDag, IntegerIdsInJson) {
  const KDag dag = KDag::build(raw_graph_from_json(
      R"({"k":1,"vertices":[0,1,2],"source":0,"sinks":[2],"multiedges":[{"from":0,"targets":[1]},{"from":1,"targets":[2]},{"from":0,"targets":[2]}]})"));
  EXPECT_EQ(count_multipaths(dag).exact, 2u);
}

TEST(Multipath, ValidityChecks) {
  const KDag dag = KDag::build(small_raw());
  Multipath pi{{1, 1, 0, 0, 1, 1, 1, 1}};
  EXPECT_TRUE(is_multipath(dag, pi));
  std::string why;
  Multipath unequal{{1, 0, 0, 0, 0, 0, 0, 0}};
  EXPECT_FALSE(is_multipath(dag, unequal, &why));
  EXPECT_FALSE(why.empty());
  Multipath no_outflow{{1, 1, 0, 0, 0, 0, 1, 1}};
  EXPECT_FALSE(is_multipath(dag, no_outflow));
  Multipath two_roots{{1, 1, 1, 1, 2, 2, 1, 1}};
  EXPECT_FALSE(is_multipath(dag, two_roots));
}

TEST(Multipath, LossAndDimensionCheck) {
  Multipath pi{{1, 2, 0}};
  const std::vector<double> l = {0.5, 0.25, 9.0};
  EXPECT_EQ(multipath_loss(pi, l), 1.0);
  const std::vector<double> wrong = {1.0};
  EXPECT_THROW(multipath_loss(pi, wrong), InvalidArgument);
}

TEST(Counting, SmallGraphByHand) {
  const KDag dag = KDag::build(small_raw());
  EXPECT_EQ(count_multipaths(dag).exact, 2u);
  EXPECT_EQ(enumerate_multipaths(dag).size(), 2u);
}

TEST(Counting, BstCatalan) {
  const std::uint64_t catalan[] = {1, 1, 2, 5, 14, 42, 132, 429};
  for (int n = 1; n <= 7; ++n) {
    const auto bst = build_bst({n});
    EXPECT_EQ(count_multipaths(bst.dag).exact, catalan[n]) << n;
    EXPECT_EQ(enumerate_multipaths(bst.dag).size(), catalan[n]) << n;
  }
}

TEST(Counting, LogCountWithoutOverflow) {
  // 70 binary choices in sequence: 2^70 paths overflows 64 bits.
  RawGraph raw;
  raw.k = 1;
  for (int i = 0; i <= 70; ++i) raw.vertices.push_back(std::to_string(i));
  raw.source = "0";
  raw.sinks = {"70"};
  for (int i = 0; i < 70; ++i) {
    raw.vertices.push_back("m" + std::to_string(i));
    raw.multiedges.push_back({std::to_string(i), {std::to_string(i + 1)}});
    raw.multiedges.push_back({std::to_string(i), {"m" + std::to_string(i)}});
    raw.multiedges.push_back({"m" + std::to_string(i), {std::to_string(i + 1)}});
  }
  const auto c = count_multipaths(KDag::build(raw));
  EXPECT_FALSE(c.exact.has_value());
  EXPECT_NEAR(c.log_count, 70 * std::log(2.0), 1e-9);
}

TEST(Counting, EnumerationCap) {
  const auto bst = build_bst({6});
  try {
    enumerate_multipaths(bst.dag, 100);
    FAIL();
  } catch (const EnumerationCapExceeded& e) {
    EXPECT_EQ(e.lower_bound(), 101u);
  }
}

TEST(Counting, FuzzAgainstBruteForce) {
  Rng rng(11);
  odp::testing::FuzzOptions opts;
  opts.max_vertices = 12;
  opts.max_count = 400;
  for (int trial = 0; trial < 60; ++trial) {
    const KDag dag = random_kdag(rng, opts);
    const auto all = enumerate_multipaths(dag);
    const auto brute = brute_multipaths(dag);
    ASSERT_EQ(all.size(), brute.size());
    std::set<std::vector<std::uint32_t>> seen;
    double derivations = 0.0;
    bool bits = true;
    for (const auto& pi : all) {
      EXPECT_TRUE(is_multipath(dag, pi));
      EXPECT_TRUE(brute.count(pi.counts));
      EXPECT_TRUE(seen.insert(pi.counts).second) << "duplicate";
      derivations += derivation_multiplicity(dag, pi);
      bits = bits && pi.is_bit_vector();
    }
    const auto count = count_multipaths(dag);
    ASSERT_TRUE(count.exact.has_value());
    EXPECT_EQ(static_cast<double>(*count.exact), derivations);
    if (bits) EXPECT_EQ(*count.exact, all.size());
  }
}

TEST(Counting, MultiplicityOfRepeatedDraws) {
  // s -> {a, a} (k = 2); a has two 2-multiedges to sinks. a is drawn twice.
  RawGraph raw;
  raw.k = 2;
  raw.vertices = {"s", "a", "t", "u"};
  raw.source = "s";
  raw.sinks = {"t", "u"};
  raw.multiedges = {{"s", {"a", "a"}}, {"a", {"t", "t"}}, {"a", {"u", "u"}}};
  const KDag dag = KDag::build(raw);
  // Derivations: tt/tt, tt/uu, uu/tt, uu/uu = 4; vectors: 3.
  EXPECT_EQ(count_multipaths(dag).exact, 4u);
  const auto all = enumerate_multipaths(dag);
  ASSERT_EQ(all.size(), 3u);
  double total = 0.0;
  for (const auto& pi : all) total += derivation_multiplicity(dag, pi);
  EXPECT_EQ(total, 4.0);
}
