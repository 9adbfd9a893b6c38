#include <gtest/gtest.h>

#include <cmath>

#include "fuzz.hpp"
#include "odp/dp_core.hpp"
#include "odp/fpl.hpp"
#include "odp/problems.hpp"

using namespace odp;
using namespace odp::testing;

namespace {

// s -> a -> t (path A) or s -> b -> t (path B)
KDag two_paths() {
  RawGraph raw;
  raw.k = 1;
  raw.vertices = {"s", "a", "b", "t"};
  raw.source = "s";
  raw.sinks = {"t"};
  raw.multiedges = {{"s", {"a"}}, {"a", {"t"}}, {"s", {"b"}}, {"b", {"t"}}};
  return KDag::build(raw);
}

}  // namespace

TEST(Fpl, ZeroScaleIsSolveAndUsesNoRandomness) {
  const auto bst = build_bst({4});
  const FplState s = fpl_init(bst.dag, 0.0);
  Rng rng(51), untouched(51);
  const Multipath pi = fpl_predict(s, bst.dag, rng);
  const std::vector<double> zero(bst.dag.num_edges(), 0.0);
  EXPECT_EQ(pi.counts, solve_min_sum_edges(bst.dag, zero).argmin.counts);
  EXPECT_EQ(rng(), untouched());
}

TEST(Fpl, LargeGapAlwaysFollowsLeader) {
  const KDag dag = two_paths();
  FplState s = fpl_init(dag, 1.0);
  fpl_update(s, std::vector<double>{0, 0, 5, 5});
  Rng rng(52);
  for (int i = 0; i < 10000; ++i) EXPECT_EQ(fpl_predict(s, dag, rng).counts[0], 1u);
}

TEST(Fpl, SymmetricTieSplitsEvenly) {
  const KDag dag = two_paths();
  const FplState s = fpl_init(dag, 1.0);
  Rng rng(53);
  const int draws = 100000;
  int a = 0;
  for (int i = 0; i < draws; ++i) a += fpl_predict(s, dag, rng).counts[0];
  EXPECT_NEAR(a / static_cast<double>(draws), 0.5, 0.01);
}

TEST(Fpl, UpdateAccumulatesAndPredictionsAreMultipaths) {
  Rng rng(54);
  for (int trial = 0; trial < 20; ++trial) {
    const KDag dag = random_kdag(rng);
    FplState s = fpl_init(dag, 2.0);
    std::vector<double> total(dag.num_edges(), 0.0);
    for (int t = 0; t < 10; ++t) {
      EXPECT_TRUE(is_multipath(dag, fpl_predict(s, dag, rng)));
      const auto l = dyadic_unit(dag.num_edges(), rng);
      for (EdgeId e = 0; e < dag.num_edges(); ++e) total[e] += l[e];
      fpl_update(s, l);
    }
    EXPECT_EQ(s.cumulative_edge_losses, total);
  }
}

TEST(Fpl, ArgumentChecks) {
  const KDag dag = two_paths();
  EXPECT_THROW(fpl_init(dag, -1.0), InvalidArgument);
  FplState s = fpl_init(dag, 1.0);
  EXPECT_THROW(fpl_update(s, std::vector<double>{1.0}), InvalidArgument);
  EXPECT_DOUBLE_EQ(fpl_default_scale(100, 4.0, 25), 4.0);
}
