#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "odp/dp_core.hpp"
#include "odp/kdag.hpp"
#include "odp/random.hpp"

namespace odp {

// ---------------------------------------------------------------------------
// Gain to loss conversion and path-length equalization (k = 1 graphs)
// ---------------------------------------------------------------------------

/// Shortest and longest source-to-sink path lengths (in edges) of a k = 1 dag.
std::pair<std::size_t, std::size_t> path_length_range(const KDag& dag);

/// l_e = 1 - g_e. Requires k = 1 and every source-to-sink path to have the
/// same number of edges n, so that loss(pi) = n - gain(pi). Throws naming a
/// shortest and a longest path when lengths differ.
EdgeLosses gains_to_losses(const KDag& dag, std::span<const double> gains);

struct EqualizedDag {
  KDag dag;
  /// For each original edge, the edge of `dag` that carries its gain (the
  /// first edge of its padded chain).
  std::vector<EdgeId> image_of;
  std::size_t added_vertices = 0;
  std::size_t added_edges = 0;
};

/// Pads a k = 1 dag with zero-gain chains so that every source-to-sink path
/// has the length of the longest one. An edge u -> v whose deficit is
/// d = h(u) - 1 - h(v) > 0 (h = longest distance to a sink) is rerouted
/// through padding vertices "v#d", "v#(d-1)", ..., "v#1" that are shared by
/// all edges entering v; paths map one-to-one and keep their gains.
EqualizedDag equalize_path_lengths(const KDag& dag);

// ---------------------------------------------------------------------------
// Optimal binary search trees (k = 2)
// ---------------------------------------------------------------------------

struct BstInstance {
  int n = 1;  // number of keys
};

/// Vertices "i,j" for 1 <= i <= n+1, i-1 <= j <= n; source "1,n"; sinks
/// "i,i-1". Multiedge r of (i,j) goes to (i,r-1) and (r+1,j).
struct BstProblem {
  int n = 0;
  KDag dag;
  struct Step {
    int i, j, r;
  };
  std::vector<Step> steps;  // per multiedge
};

BstProblem build_bst(const BstInstance& inst);

/// Multiedge loss sum_{k=i..j} p_k + sum_{k=i-1..j} q_k; sink (i,i-1) costs
/// q_{i-1}. p has n entries (p_1..p_n), q has n+1 (q_0..q_n); together they
/// must sum to 1 (within 1e-9; sums within 1e-6 are rescaled).
DpLosses bst_losses(const BstProblem& bst, std::span<const double> p, std::span<const double> q);

// ---------------------------------------------------------------------------
// Matrix chain multiplication (k = 2)
// ---------------------------------------------------------------------------

struct MatrixChainInstance {
  int n = 2;          // number of matrices
  double d_max = 1;   // dimension cap
};

/// Vertices "i,j" for 1 <= i <= j <= n; source "1,n"; sinks "i,i". The
/// split-k multiedge of (i,j) goes to (i,k) and (k+1,j).
struct MatrixChainProblem {
  int n = 0;
  double d_max = 1;
  KDag dag;
  struct Step {
    int i, j, split;
  };
  std::vector<Step> steps;
};

MatrixChainProblem build_matrix_chain(const MatrixChainInstance& inst);

/// Multiedge loss d_{i-1} d_k d_j, sinks 0. d holds d_0..d_n in [1, d_max].
DpLosses mc_losses(const MatrixChainProblem& mc, std::span<const double> d);

// ---------------------------------------------------------------------------
// Knapsack (k = 1)
// ---------------------------------------------------------------------------

struct KnapsackInstance {
  int capacity = 0;
  std::vector<int> heaviness;  // h_1..h_n, each in [1, capacity]
};

/// Subproblems "i,c" reachable from (n, C); at (i,c) the "skip" multiedge to
/// (i-1,c) comes first, then "take" to (i-1,c-h_i) when c >= h_i. Sinks are
/// the reachable (0,c).
struct KnapsackProblem {
  int n = 0;
  KDag dag;
  struct Step {
    int item;   // 1-based item index
    bool take;
  };
  std::vector<Step> steps;
  std::size_t pruned_vertices = 0;  // (n+1)(C+1) minus reachable
};

KnapsackProblem build_knapsack(const KnapsackInstance& inst);

/// Edge gains (0 for skip, p_i for take) converted to losses 1 - g.
DpLosses ks_losses(const KnapsackProblem& ks, std::span<const double> profits);

// ---------------------------------------------------------------------------
// Rod cutting (k = 1, equalized)
// ---------------------------------------------------------------------------

struct RodInstance {
  int n = 1;
};

/// Base vertices 0..n with an edge i -> j (piece of length i-j) for j < i,
/// padded so every cutting is a path of exactly n edges.
struct RodProblem {
  int n = 0;
  KDag dag;
  std::vector<int> piece_of_edge;  // piece length carried by each edge, 0 on padding
};

RodProblem build_rod(const RodInstance& inst);
DpLosses rod_losses(const RodProblem& rod, std::span<const double> profits);

// ---------------------------------------------------------------------------
// Weighted interval scheduling (k = 1, equalized)
// ---------------------------------------------------------------------------

struct Interval {
  double start = 0.0;
  double end = 0.0;
};

struct WisInstance {
  std::vector<Interval> intervals;  // sorted by end
};

/// pred(i): the largest j < i with I_j ending no later than I_i starts
/// (0 if none), by binary search over the sorted ends.
std::vector<int> wis_predecessors(std::span<const Interval> intervals);

/// Base vertices 0..n; at i "skip" goes to i-1 and "take" goes to pred(i).
/// Padded to uniform path length n.
struct WisProblem {
  int n = 0;
  KDag dag;
  std::vector<int> pred;           // pred[i] for i = 1..n (pred[0] unused)
  std::vector<int> take_of_edge;   // 1-based interval taken by each edge, 0 otherwise
};

WisProblem build_wis(const WisInstance& inst);
DpLosses wis_losses(const WisProblem& wis, std::span<const double> profits);

// ---------------------------------------------------------------------------
// Type-erased instance used by the harness and the CLI
// ---------------------------------------------------------------------------

struct ProblemInstance {
  std::string kind;  // "bst", "matrix_chain", "knapsack", "rod", "wis"
  KDag dag;
  double loss_bound = 1.0;   // B: per-trial loss bound of any multipath
  double norm_bound = 1.0;   // D: 1-norm of every multipath
  /// Largest possible per-trial loss. Equals B except for BST, whose deepest
  /// gap sits at depth n+1 while the declared B is n.
  double loss_max = 1.0;
  bool bit_vector_multipaths = true;
  std::size_t num_components = 0;
  /// Adversary component vector (problem order) to recurrence losses.
  std::function<DpLosses(std::span<const double>)> losses;
  /// One i.i.d. adversary draw.
  std::function<std::vector<double>(Rng&)> draw_iid;
};

ProblemInstance make_problem(BstProblem bst);
ProblemInstance make_problem(MatrixChainProblem mc);
ProblemInstance make_problem(KnapsackProblem ks);
ProblemInstance make_problem(RodProblem rod);
ProblemInstance make_problem(WisProblem wis);

/// Dirichlet(1, ..., 1) sample of the given dimension.
std::vector<double> dirichlet_ones(std::size_t dim, Rng& rng);

}  // namespace odp
