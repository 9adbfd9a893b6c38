#include "odp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

namespace odp {

namespace {

std::string pair_name(int a, int b) { return std::to_string(a) + "," + std::to_string(b); }

void require_k1(const KDag& dag, const char* what) {
  if (dag.k() != 1) throw InvalidArgument(std::string(what) + ": requires k = 1");
}

void check_unit_range(std::span<const double> xs, const char* what) {
  for (double x : xs)
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument(std::string(what) + ": values must lie in [0,1]");
}

// Longest (or shortest) number of edges from each vertex to a sink, with the
// first multiedge achieving it.
struct PathExtent {
  std::vector<std::size_t> length;
  std::vector<MultiedgeId> choice;
};

PathExtent path_extent(const KDag& dag, bool longest) {
  PathExtent pe{std::vector<std::size_t>(dag.num_vertices(), 0),
                std::vector<MultiedgeId>(dag.num_vertices(), 0)};
  const auto order = dag.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId v = *it;
    if (dag.is_sink(v)) continue;
    bool first = true;
    for (MultiedgeId m : dag.out_multiedges(v)) {
      const std::size_t len = 1 + pe.length[dag.edge_to(dag.first_edge(m))];
      if (first || (longest ? len > pe.length[v] : len < pe.length[v])) {
        pe.length[v] = len;
        pe.choice[v] = m;
        first = false;
      }
    }
  }
  return pe;
}

std::string describe_path(const KDag& dag, const PathExtent& pe) {
  std::ostringstream os;
  VertexId v = dag.source();
  os << dag.vertex_name(v);
  while (!dag.is_sink(v)) {
    v = dag.edge_to(dag.first_edge(pe.choice[v]));
    os << " -> " << dag.vertex_name(v);
  }
  return os.str();
}

DpLosses k1_losses_from_gains(const KDag& dag, std::span<const double> gains) {
  DpLosses out;
  out.multiedge_loss = gains_to_losses(dag, gains);
  for (VertexId s : dag.sinks()) out.sink_loss.emplace(s, 0.0);
  return out;
}

}  // namespace

std::pair<std::size_t, std::size_t> path_length_range(const KDag& dag) {
  require_k1(dag, "path_length_range");
  return {path_extent(dag, false).length[dag.source()], path_extent(dag, true).length[dag.source()]};
}

EdgeLosses gains_to_losses(const KDag& dag, std::span<const double> gains) {
  require_k1(dag, "gains_to_losses");
  if (gains.size() != dag.num_edges()) throw InvalidArgument("gains_to_losses: wrong dimension");
  check_unit_range(gains, "gains_to_losses");
  const PathExtent shortest = path_extent(dag, false);
  const PathExtent longest = path_extent(dag, true);
  if (shortest.length[dag.source()] != longest.length[dag.source()]) {
    throw InvalidArgument("gains_to_losses: unequal path lengths, e.g. " +
                          describe_path(dag, shortest) + " (" +
                          std::to_string(shortest.length[dag.source()]) + " edges) and " +
                          describe_path(dag, longest) + " (" +
                          std::to_string(longest.length[dag.source()]) + " edges)");
  }
  EdgeLosses out(gains.size());
  std::transform(gains.begin(), gains.end(), out.begin(), [](double g) { return 1.0 - g; });
  return out;
}

EqualizedDag equalize_path_lengths(const KDag& dag) {
  require_k1(dag, "equalize_path_lengths");
  const PathExtent longest = path_extent(dag, true);
  const auto& h = longest.length;

  RawGraph raw = dag.to_raw();
  std::vector<std::size_t> max_deficit(dag.num_vertices(), 0);
  std::vector<std::size_t> deficit(dag.num_edges(), 0);
  for (EdgeId e = 0; e < dag.num_edges(); ++e) {
    const VertexId u = dag.edge_from(e), v = dag.edge_to(e);
    deficit[e] = h[u] - 1 - h[v];
    max_deficit[v] = std::max(max_deficit[v], deficit[e]);
  }

  auto pad_name = [&](VertexId v, std::size_t r) {
    return dag.vertex_name(v) + "#" + std::to_string(r);
  };
  EqualizedDag out;

  for (EdgeId e = 0; e < dag.num_edges(); ++e)
    if (deficit[e] > 0) raw.multiedges[e].targets[0] = pad_name(dag.edge_to(e), deficit[e]);
  for (VertexId v = 0; v < dag.num_vertices(); ++v) {
    for (std::size_t r = 1; r <= max_deficit[v]; ++r) {
      raw.vertices.push_back(pad_name(v, r));
      raw.multiedges.push_back({pad_name(v, r), {r == 1 ? dag.vertex_name(v) : pad_name(v, r - 1)}});
      ++out.added_vertices;
      ++out.added_edges;
    }
  }
  out.dag = KDag::build(raw);
  // Original multiedges keep their ids, so each original edge keeps its id too.
  out.image_of.resize(dag.num_edges());
  std::iota(out.image_of.begin(), out.image_of.end(), EdgeId{0});
  return out;
}

// ---------------------------------------------------------------------------

BstProblem build_bst(const BstInstance& inst) {
  if (inst.n < 1) throw InvalidArgument("build_bst: n must be >= 1");
  const int n = inst.n;
  RawGraph raw;
  raw.k = 2;
  raw.source = pair_name(1, n);
  BstProblem out;
  out.n = n;
  for (int len = n; len >= 0; --len)
    for (int i = 1; i + len - 1 <= n; ++i) raw.vertices.push_back(pair_name(i, i + len - 1));
  for (int i = 1; i <= n + 1; ++i) raw.sinks.push_back(pair_name(i, i - 1));
  for (int len = n; len >= 1; --len)
    for (int i = 1; i + len - 1 <= n; ++i) {
      const int j = i + len - 1;
      for (int r = i; r <= j; ++r) {
        raw.multiedges.push_back({pair_name(i, j), {pair_name(i, r - 1), pair_name(r + 1, j)}});
        out.steps.push_back({i, j, r});
      }
    }
  out.dag = KDag::build(raw);
  return out;
}

DpLosses bst_losses(const BstProblem& bst, std::span<const double> p, std::span<const double> q) {
  const int n = bst.n;
  if (p.size() != static_cast<std::size_t>(n) || q.size() != static_cast<std::size_t>(n + 1))
    throw InvalidArgument("bst_losses: expected n key and n+1 gap frequencies");
  check_unit_range(p, "bst_losses");
  check_unit_range(q, "bst_losses");
  const double total = std::accumulate(p.begin(), p.end(), 0.0) + std::accumulate(q.begin(), q.end(), 0.0);
  double scale = 1.0;
  if (std::abs(total - 1.0) > 1e-9) {
    if (std::abs(total - 1.0) > 1e-6)
      throw InvalidArgument("bst_losses: frequencies sum to " + std::to_string(total) + ", expected 1");
    scale = 1.0 / total;
  }

  // Prefix sums: P[j] = p_1 + ... + p_j, Q[j] = q_0 + ... + q_{j}.
  std::vector<double> pp(n + 1, 0.0), qq(n + 2, 0.0);
  for (int j = 1; j <= n; ++j) pp[j] = pp[j - 1] + p[j - 1] * scale;
  for (int j = 0; j <= n; ++j) qq[j + 1] = qq[j] + q[j] * scale;

  DpLosses out;
  out.multiedge_loss.resize(bst.steps.size());
  for (std::size_t m = 0; m < bst.steps.size(); ++m) {
    const auto& s = bst.steps[m];
    // sum_{k=i..j} p_k + sum_{k=i-1..j} q_k
    out.multiedge_loss[m] = (pp[s.j] - pp[s.i - 1]) + (qq[s.j + 1] - qq[s.i - 1]);
  }
  for (int i = 1; i <= n + 1; ++i)
    out.sink_loss.emplace(*bst.dag.find_vertex(pair_name(i, i - 1)), q[i - 1] * scale);
  return out;
}

// ---------------------------------------------------------------------------

MatrixChainProblem build_matrix_chain(const MatrixChainInstance& inst) {
  if (inst.n < 2) throw InvalidArgument("build_matrix_chain: n must be >= 2");
  if (!(inst.d_max >= 1)) throw InvalidArgument("build_matrix_chain: d_max must be >= 1");
  const int n = inst.n;
  RawGraph raw;
  raw.k = 2;
  raw.source = pair_name(1, n);
  MatrixChainProblem out;
  out.n = n;
  out.d_max = inst.d_max;
  for (int len = n; len >= 1; --len)
    for (int i = 1; i + len - 1 <= n; ++i) raw.vertices.push_back(pair_name(i, i + len - 1));
  for (int i = 1; i <= n; ++i) raw.sinks.push_back(pair_name(i, i));
  for (int len = n; len >= 2; --len)
    for (int i = 1; i + len - 1 <= n; ++i) {
      const int j = i + len - 1;
      for (int split = i; split < j; ++split) {
        raw.multiedges.push_back({pair_name(i, j), {pair_name(i, split), pair_name(split + 1, j)}});
        out.steps.push_back({i, j, split});
      }
    }
  out.dag = KDag::build(raw);
  return out;
}

DpLosses mc_losses(const MatrixChainProblem& mc, std::span<const double> d) {
  if (d.size() != static_cast<std::size_t>(mc.n + 1))
    throw InvalidArgument("mc_losses: expected n+1 dimensions");
  for (double x : d)
    if (!(x >= 1.0 && x <= mc.d_max))
      throw InvalidArgument("mc_losses: dimensions must lie in [1, d_max]");
  DpLosses out;
  out.multiedge_loss.resize(mc.steps.size());
  for (std::size_t m = 0; m < mc.steps.size(); ++m) {
    const auto& s = mc.steps[m];
    out.multiedge_loss[m] = d[s.i - 1] * d[s.split] * d[s.j];
  }
  for (VertexId s : mc.dag.sinks()) out.sink_loss.emplace(s, 0.0);
  return out;
}

// ---------------------------------------------------------------------------

KnapsackProblem build_knapsack(const KnapsackInstance& inst) {
  const int n = static_cast<int>(inst.heaviness.size());
  const int cap = inst.capacity;
  if (n < 1) throw InvalidArgument("build_knapsack: need at least one item");
  if (cap < 1) throw InvalidArgument("build_knapsack: capacity must be >= 1");
  for (int h : inst.heaviness)
    if (h < 1 || h > cap) throw InvalidArgument("build_knapsack: heaviness must lie in [1, C]");

  KnapsackProblem out;
  out.n = n;
  RawGraph raw;
  raw.k = 1;
  raw.source = pair_name(n, cap);
  // Level-by-level discovery from (n, C), capacities in descending order.
  std::set<int, std::greater<>> level{cap};
  std::size_t reachable = 0;
  for (int i = n; i >= 1; --i) {
    std::set<int, std::greater<>> next;
    const int h = inst.heaviness[i - 1];
    for (int c : level) {
      raw.vertices.push_back(pair_name(i, c));
      raw.multiedges.push_back({pair_name(i, c), {pair_name(i - 1, c)}});
      out.steps.push_back({i, false});
      next.insert(c);
      if (c >= h) {
        raw.multiedges.push_back({pair_name(i, c), {pair_name(i - 1, c - h)}});
        out.steps.push_back({i, true});
        next.insert(c - h);
      }
    }
    reachable += level.size();
    level = std::move(next);
  }
  for (int c : level) {
    raw.vertices.push_back(pair_name(0, c));
    raw.sinks.push_back(pair_name(0, c));
  }
  reachable += level.size();
  out.pruned_vertices = static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(cap + 1) - reachable;
  out.dag = KDag::build(raw);
  return out;
}

DpLosses ks_losses(const KnapsackProblem& ks, std::span<const double> profits) {
  if (profits.size() != static_cast<std::size_t>(ks.n))
    throw InvalidArgument("ks_losses: expected one profit per item");
  check_unit_range(profits, "ks_losses");
  std::vector<double> gains(ks.dag.num_edges(), 0.0);
  for (EdgeId e = 0; e < gains.size(); ++e)
    if (ks.steps[e].take) gains[e] = profits[ks.steps[e].item - 1];
  return k1_losses_from_gains(ks.dag, gains);
}

// ---------------------------------------------------------------------------

RodProblem build_rod(const RodInstance& inst) {
  if (inst.n < 1) throw InvalidArgument("build_rod: n must be >= 1");
  const int n = inst.n;
  RawGraph raw;
  raw.k = 1;
  raw.source = std::to_string(n);
  raw.sinks = {"0"};
  std::vector<int> piece;
  for (int i = n; i >= 0; --i) raw.vertices.push_back(std::to_string(i));
  for (int i = n; i >= 1; --i)
    for (int len = 1; len <= i; ++len) {
      raw.multiedges.push_back({std::to_string(i), {std::to_string(i - len)}});
      piece.push_back(len);
    }
  const KDag base = KDag::build(raw);
  EqualizedDag eq = equalize_path_lengths(base);

  RodProblem out;
  out.n = n;
  out.dag = std::move(eq.dag);
  out.piece_of_edge.assign(out.dag.num_edges(), 0);
  for (EdgeId e = 0; e < base.num_edges(); ++e) out.piece_of_edge[eq.image_of[e]] = piece[e];
  return out;
}

DpLosses rod_losses(const RodProblem& rod, std::span<const double> profits) {
  if (profits.size() != static_cast<std::size_t>(rod.n))
    throw InvalidArgument("rod_losses: expected one profit per piece length");
  check_unit_range(profits, "rod_losses");
  std::vector<double> gains(rod.dag.num_edges(), 0.0);
  for (EdgeId e = 0; e < gains.size(); ++e)
    if (rod.piece_of_edge[e] > 0) gains[e] = profits[rod.piece_of_edge[e] - 1];
  return k1_losses_from_gains(rod.dag, gains);
}

// ---------------------------------------------------------------------------

std::vector<int> wis_predecessors(std::span<const Interval> intervals) {
  const std::size_t n = intervals.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(intervals[i].start < intervals[i].end))
      throw InvalidArgument("wis: every interval needs start < end");
    if (i > 0 && intervals[i].end < intervals[i - 1].end)
      throw InvalidArgument("wis: intervals must be sorted by end");
  }
  std::vector<double> ends(n);
  for (std::size_t i = 0; i < n; ++i) ends[i] = intervals[i].end;
  std::vector<int> pred(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    // Number of intervals among I_1..I_{i-1} ending at or before I_i starts.
    const auto it = std::upper_bound(ends.begin(), ends.begin() + static_cast<long>(i - 1),
                                     intervals[i - 1].start);
    pred[i] = static_cast<int>(it - ends.begin());
  }
  return pred;
}

WisProblem build_wis(const WisInstance& inst) {
  const int n = static_cast<int>(inst.intervals.size());
  if (n < 1) throw InvalidArgument("build_wis: need at least one interval");
  WisProblem out;
  out.n = n;
  out.pred = wis_predecessors(inst.intervals);

  RawGraph raw;
  raw.k = 1;
  raw.source = std::to_string(n);
  raw.sinks = {"0"};
  std::vector<int> take;
  for (int i = n; i >= 0; --i) raw.vertices.push_back(std::to_string(i));
  for (int i = n; i >= 1; --i) {
    raw.multiedges.push_back({std::to_string(i), {std::to_string(i - 1)}});
    take.push_back(0);
    raw.multiedges.push_back({std::to_string(i), {std::to_string(out.pred[i])}});
    take.push_back(i);
  }
  const KDag base = KDag::build(raw);
  EqualizedDag eq = equalize_path_lengths(base);
  out.dag = std::move(eq.dag);
  out.take_of_edge.assign(out.dag.num_edges(), 0);
  for (EdgeId e = 0; e < base.num_edges(); ++e) out.take_of_edge[eq.image_of[e]] = take[e];
  return out;
}

DpLosses wis_losses(const WisProblem& wis, std::span<const double> profits) {
  if (profits.size() != static_cast<std::size_t>(wis.n))
    throw InvalidArgument("wis_losses: expected one profit per interval");
  check_unit_range(profits, "wis_losses");
  std::vector<double> gains(wis.dag.num_edges(), 0.0);
  for (EdgeId e = 0; e < gains.size(); ++e)
    if (wis.take_of_edge[e] > 0) gains[e] = profits[wis.take_of_edge[e] - 1];
  return k1_losses_from_gains(wis.dag, gains);
}

// ---------------------------------------------------------------------------

std::vector<double> dirichlet_ones(std::size_t dim, Rng& rng) {
  // Normalized standard exponentials are Dirichlet(1, ..., 1).
  std::vector<double> x(dim);
  double sum = 0.0;
  for (double& v : x) {
    v = -std::log1p(-uniform01(rng));
    sum += v;
  }
  for (double& v : x) v /= sum;
  return x;
}

namespace {
std::vector<double> uniform_vector(std::size_t dim, Rng& rng) {
  std::vector<double> x(dim);
  for (double& v : x) v = uniform01(rng);
  return x;
}
}  // namespace

ProblemInstance make_problem(BstProblem bst) {
  ProblemInstance p;
  p.kind = "bst";
  const int n = bst.n;
  p.loss_bound = n;
  p.loss_max = n + 1;
  p.norm_bound = 2.0 * n;
  p.num_components = static_cast<std::size_t>(2 * n + 1);
  auto shared = std::make_shared<BstProblem>(std::move(bst));
  p.dag = shared->dag;
  p.losses = [shared, n](std::span<const double> c) {
    if (c.size() != static_cast<std::size_t>(2 * n + 1))
      throw InvalidArgument("bst: expected 2n+1 components (p_1..p_n, q_0..q_n)");
    return bst_losses(*shared, c.subspan(0, n), c.subspan(n));
  };
  p.draw_iid = [dim = p.num_components](Rng& rng) { return dirichlet_ones(dim, rng); };
  return p;
}

ProblemInstance make_problem(MatrixChainProblem mc) {
  ProblemInstance p;
  p.kind = "matrix_chain";
  const int n = mc.n;
  const double d_max = mc.d_max;
  p.loss_bound = (n - 1) * d_max * d_max * d_max;
  p.loss_max = p.loss_bound;
  p.norm_bound = 2.0 * (n - 1);
  p.num_components = static_cast<std::size_t>(n + 1);
  auto shared = std::make_shared<MatrixChainProblem>(std::move(mc));
  p.dag = shared->dag;
  p.losses = [shared](std::span<const double> c) { return mc_losses(*shared, c); };
  p.draw_iid = [dim = p.num_components, d_max](Rng& rng) {
    std::vector<double> d(dim);
    const double top = std::floor(d_max);
    for (double& x : d) x = std::min(top, 1.0 + std::floor(uniform01(rng) * top));
    return d;
  };
  return p;
}

ProblemInstance make_problem(KnapsackProblem ks) {
  ProblemInstance p;
  p.kind = "knapsack";
  p.loss_bound = ks.n;
  p.loss_max = ks.n;
  p.norm_bound = ks.n;
  p.num_components = static_cast<std::size_t>(ks.n);
  auto shared = std::make_shared<KnapsackProblem>(std::move(ks));
  p.dag = shared->dag;
  p.losses = [shared](std::span<const double> c) { return ks_losses(*shared, c); };
  p.draw_iid = [dim = p.num_components](Rng& rng) { return uniform_vector(dim, rng); };
  return p;
}

ProblemInstance make_problem(RodProblem rod) {
  ProblemInstance p;
  p.kind = "rod";
  p.loss_bound = rod.n;
  p.loss_max = rod.n;
  p.norm_bound = rod.n;
  p.num_components = static_cast<std::size_t>(rod.n);
  auto shared = std::make_shared<RodProblem>(std::move(rod));
  p.dag = shared->dag;
  p.losses = [shared](std::span<const double> c) { return rod_losses(*shared, c); };
  p.draw_iid = [dim = p.num_components](Rng& rng) { return uniform_vector(dim, rng); };
  return p;
}

ProblemInstance make_problem(WisProblem wis) {
  ProblemInstance p;
  p.kind = "wis";
  p.loss_bound = wis.n;
  p.loss_max = wis.n;
  p.norm_bound = wis.n;
  p.num_components = static_cast<std::size_t>(wis.n);
  auto shared = std::make_shared<WisProblem>(std::move(wis));
  p.dag = shared->dag;
  p.losses = [shared](std::span<const double> c) { return wis_losses(*shared, c); };
  p.draw_iid = [dim = p.num_components](Rng& rng) { return uniform_vector(dim, rng); };
  return p;
}

}  // namespace odp
