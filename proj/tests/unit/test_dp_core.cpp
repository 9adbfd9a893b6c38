#include <gtest/gtest.h>

#include <limits>

#include "fuzz.hpp"
#include "odp/dp_core.hpp"
#include "odp/problems.hpp"

using namespace odp;
using namespace odp::testing;

namespace {

DpLosses random_dp_losses(const KDag& dag, Rng& rng) {
  DpLosses l;
  l.multiedge_loss = dyadic_unit(dag.num_multiedges(), rng);
  const auto sink = dyadic_unit(dag.sinks().size(), rng);
  for (std::size_t i = 0; i < sink.size(); ++i) l.sink_loss[dag.sinks()[i]] = sink[i];
  return l;
}

}  // namespace

TEST(Lowering, MatchesRecurrenceLossOnEveryMultipath) {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const KDag dag = random_kdag(rng, {.max_vertices = 14, .max_count = 500});
    const DpLosses dp = random_dp_losses(dag, rng);
    const EdgeLosses edge = lower_edge_losses(dag, dp);
    for (const auto& pi : enumerate_multipaths(dag)) {
      // sum_m pi_m L_M(m) + sum_sinks inflow(u) L_T(u)
      double direct = 0.0;
      for (MultiedgeId m = 0; m < dag.num_multiedges(); ++m)
        direct += pi.multiedge_count(dag, m) * dp.multiedge_loss[m];
      for (EdgeId e = 0; e < dag.num_edges(); ++e)
        if (dag.is_sink(dag.edge_to(e))) direct += pi.counts[e] * dp.sink_loss.at(dag.edge_to(e));
      EXPECT_NEAR(multipath_loss(pi, edge), direct, 1e-12);
    }
  }
}

TEST(Lowering, NamesMissingEntries) {
  const auto bst = build_bst({2});
  DpLosses dp;
  dp.multiedge_loss.assign(bst.dag.num_multiedges(), 0.0);
  try {
    lower_edge_losses(bst.dag, dp);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("1,0"), std::string::npos) << e.what();
  }
  dp.multiedge_loss.pop_back();
  EXPECT_THROW(lower_edge_losses(bst.dag, dp), InvalidArgument);
}

TEST(Lowering, RejectsNonFinite) {
  const auto bst = build_bst({1});
  DpLosses dp;
  dp.multiedge_loss = {std::numeric_limits<double>::quiet_NaN()};
  for (VertexId s : bst.dag.sinks()) dp.sink_loss[s] = 0.0;
  EXPECT_THROW(lower_edge_losses(bst.dag, dp), InvalidArgument);
}

TEST(MinSum, EqualsEnumerationMinimumOnFuzz) {
  Rng rng(5);
  for (int trial = 0; trial < 80; ++trial) {
    const KDag dag = random_kdag(rng, {.max_vertices = 16, .max_count = 2000});
    const auto loss = dyadic_unit(dag.num_edges(), rng);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pi : enumerate_multipaths(dag)) best = std::min(best, multipath_loss(pi, loss));
    const auto sol = solve_min_sum_edges(dag, loss);
    EXPECT_EQ(sol.value, best);
    EXPECT_TRUE(is_multipath(dag, sol.argmin));
    EXPECT_EQ(multipath_loss(sol.argmin, loss), sol.value);
    const auto table = min_sum_table(dag, loss);
    EXPECT_EQ(table[dag.source()], best);
  }
}

TEST(MinSum, TiesGoToSmallestMultiedgeId) {
  const auto bst = build_bst({3});
  const std::vector<double> zero(bst.dag.num_edges(), 0.0);
  const auto sol = solve_min_sum_edges(bst.dag, zero);
  // Root 1 at (1,3), then root 2 at (2,3).
  EXPECT_EQ(sol.argmin.multiedge_count(bst.dag, 0), 1u);
  EXPECT_EQ(sol.value, 0.0);
}

TEST(MinSum, MatrixChainTextbookInstance) {
  const auto mc = build_matrix_chain({3, 100});
  const std::vector<double> d = {10, 100, 5, 50};
  const auto sol = solve_min_sum(mc.dag, mc_losses(mc, d));
  EXPECT_EQ(sol.value, 7500.0);
}

TEST(MinSum, SingleObject) {
  const auto mc = build_matrix_chain({2, 10});
  const std::vector<double> d = {2, 3, 4};
  EXPECT_EQ(solve_min_sum(mc.dag, mc_losses(mc, d)).value, 24.0);
}
