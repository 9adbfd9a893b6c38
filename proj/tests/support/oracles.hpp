#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "odp/hedge_component.hpp"
#include "odp/kdag.hpp"
#include "odp/problems.hpp"

namespace odp::testing {

/// argmin_w sum_i w_i log(w_i / w_hat_i) - w_i + w_hat_i  s.t.  A w = b, by
/// damped Newton steps on the KKT system. Knows nothing about k-flows.
Eigen::VectorXd min_relative_entropy(const Eigen::VectorXd& w_hat, const Eigen::MatrixXd& a,
                                     const Eigen::VectorXd& b, int max_iter = 200);

/// The linear system A w = b of one k-flow constraint, over all edges:
/// source outflow = k; equal weights within a multiedge; outflow = k inflow.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> constraint_system(const KDag& dag, Constraint c);

// Object-level brute force. Each object carries its own directly computed
// cost; decode_* map a multipath of the corresponding dag back to an object.

struct Tree {
  std::vector<int> key_depth;  // keys 1..n at index 0..n-1
  std::vector<int> gap_depth;  // gaps 0..n
};
std::vector<Tree> all_bsts(int n);
double bst_cost(const Tree& t, const std::vector<double>& p, const std::vector<double>& q);
Tree decode_bst(const BstProblem& bst, const Multipath& pi);

struct Parenthesization {
  std::string text;
  double cost = 0.0;
};
std::vector<Parenthesization> all_parenthesizations(const std::vector<double>& d);
Parenthesization decode_matrix_chain(const MatrixChainProblem& mc, const Multipath& pi,
                                     const std::vector<double>& d);

/// Items (1-based) of every feasible packing.
std::vector<std::vector<int>> all_packings(const KnapsackInstance& inst);
std::vector<int> decode_knapsack(const KnapsackProblem& ks, const Multipath& pi);

/// Every ordered cutting of a rod of length n into piece lengths.
std::vector<std::vector<int>> all_cuttings(int n);
std::vector<int> decode_rod(const RodProblem& rod, const Multipath& pi);

/// Every set of pairwise non-overlapping intervals (1-based).
std::vector<std::vector<int>> all_schedulings(const std::vector<Interval>& intervals);
std::vector<int> decode_wis(const WisProblem& wis, const Multipath& pi);

/// Edges of a k = 1 multipath from source to sink.
std::vector<EdgeId> path_edges(const KDag& dag, const Multipath& pi);

/// Six overlapping intervals sorted by end.
WisInstance six_interval_instance();

}  // namespace odp::testing
