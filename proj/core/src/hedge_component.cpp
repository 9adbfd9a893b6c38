#include "odp/hedge_component.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "odp/kdag_json.hpp"
#include "odp/version.hpp"

namespace odp {

void ProjectionConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("ProjectionConfig: tol must be > 0");
  if (epsilon && !(*epsilon >= 0.0)) throw InvalidArgument("ProjectionConfig: epsilon must be >= 0");
  if (!(floor > 0.0)) throw InvalidArgument("ProjectionConfig: floor must be > 0");
  if (max_cycles == 0) throw InvalidArgument("ProjectionConfig: max_cycles must be >= 1");
}

double Residuals::max() const { return std::max({source, multiedge, vertex}); }

namespace {

double out_flow(const KDag& dag, std::span<const double> w, VertexId v) {
  double s = 0.0;
  for (MultiedgeId m : dag.out_multiedges(v))
    for (int j = 0; j < dag.k(); ++j) s += w[dag.first_edge(m) + j];
  return s;
}

double in_flow(const KDag& dag, std::span<const double> w, VertexId v) {
  double s = 0.0;
  for (EdgeId e : dag.in_edges(v)) s += w[e];
  return s;
}

bool is_internal(const KDag& dag, VertexId v) { return v != dag.source() && !dag.is_sink(v); }

}  // namespace

Residuals kflow_residuals(const KDag& dag, std::span<const double> w) {
  if (w.size() != dag.num_edges()) throw InvalidArgument("kflow_residuals: wrong dimension");
  Residuals r;
  r.source = std::abs(out_flow(dag, w, dag.source()) - dag.k());
  for (MultiedgeId m = 0; m < dag.num_multiedges(); ++m) {
    const auto first = w.begin() + dag.first_edge(m);
    const auto [lo, hi] = std::minmax_element(first, first + dag.k());
    const double mean = std::accumulate(first, first + dag.k(), 0.0) / dag.k();
    if (mean > 0.0) r.multiedge = std::max(r.multiedge, (*hi - *lo) / mean);
  }
  for (VertexId v = 0; v < dag.num_vertices(); ++v) {
    if (!is_internal(dag, v)) continue;
    r.vertex = std::max(r.vertex, std::abs(out_flow(dag, w, v) - dag.k() * in_flow(dag, w, v)));
  }
  return r;
}

double relative_entropy(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("relative_entropy: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) d += a[i] * std::log(a[i] / b[i]) - a[i];
    d += b[i];
  }
  return d;
}

double relative_entropy(const Multipath& pi, std::span<const double> b) {
  std::vector<double> a(pi.counts.begin(), pi.counts.end());
  return relative_entropy(a, b);
}

// ---------------------------------------------------------------------------
// Projection steps
// ---------------------------------------------------------------------------

namespace {

/// Precomputed adjacency for repeated sweeps.
struct Layout {
  std::vector<EdgeId> source_out;
  std::vector<VertexId> internal;  // topo order
  std::vector<std::vector<EdgeId>> out_edges;
  std::vector<std::vector<EdgeId>> in_edges;

  explicit Layout(const KDag& dag) : out_edges(dag.num_vertices()), in_edges(dag.num_vertices()) {
    for (VertexId v = 0; v < dag.num_vertices(); ++v) {
      for (MultiedgeId m : dag.out_multiedges(v))
        for (int j = 0; j < dag.k(); ++j) out_edges[v].push_back(dag.first_edge(m) + j);
      auto in = dag.in_edges(v);
      in_edges[v].assign(in.begin(), in.end());
    }
    source_out = out_edges[dag.source()];
    for (VertexId v : dag.topo_order())
      if (is_internal(dag, v)) internal.push_back(v);
  }
};

void source_step(const KDag& dag, std::vector<double>& w, std::span<const EdgeId> out,
                 double floor) {
  double sum = 0.0;
  for (EdgeId e : out) {
    w[e] = std::max(w[e], floor);
    sum += w[e];
  }
  const double scale = dag.k() / sum;
  for (EdgeId e : out) w[e] *= scale;
}

void multiedge_step(const KDag& dag, std::vector<double>& w, MultiedgeId m, double floor) {
  const EdgeId first = dag.first_edge(m);
  const int k = dag.k();
  if (k == 1) {
    w[first] = std::max(w[first], floor);
    return;
  }
  double log_sum = 0.0;
  for (int j = 0; j < k; ++j) log_sum += std::log(std::max(w[first + j], floor));
  const double g = std::exp(log_sum / k);
  for (int j = 0; j < k; ++j) w[first + j] = g;
}

bool vertex_step(const KDag& dag, std::vector<double>& w, std::span<const EdgeId> in,
                 std::span<const EdgeId> out, double floor) {
  double in_sum = 0.0, out_sum = 0.0;
  for (EdgeId e : in) in_sum += w[e];
  for (EdgeId e : out) out_sum += w[e];
  if (!(in_sum > 0.0) || !(out_sum > 0.0)) return false;
  const double k = dag.k();
  // beta = (k in / out)^(1/(k+1)); out *= beta, in *= beta^-k.
  const double log_beta = (std::log(k) + std::log(in_sum) - std::log(out_sum)) / (k + 1.0);
  const double out_scale = std::exp(log_beta);
  const double in_scale = std::exp(-k * log_beta);
  for (EdgeId e : out) w[e] = std::max(w[e] * out_scale, floor);
  for (EdgeId e : in) w[e] = std::max(w[e] * in_scale, floor);
  return true;
}

}  // namespace

bool apply_projection_step(const KDag& dag, std::vector<double>& w, Constraint c, double floor) {
  if (w.size() != dag.num_edges()) throw InvalidArgument("projection step: wrong dimension");
  switch (c.kind) {
    case Constraint::Kind::Source: {
      std::vector<EdgeId> out;
      for (MultiedgeId m : dag.out_multiedges(dag.source()))
        for (int j = 0; j < dag.k(); ++j) out.push_back(dag.first_edge(m) + j);
      source_step(dag, w, out, floor);
      return true;
    }
    case Constraint::Kind::Multiedge:
      if (c.id >= dag.num_multiedges()) throw InvalidArgument("projection step: bad multiedge id");
      multiedge_step(dag, w, c.id, floor);
      return true;
    case Constraint::Kind::Vertex: {
      if (c.id >= dag.num_vertices() || !is_internal(dag, c.id))
        throw InvalidArgument("projection step: vertex constraint needs an internal vertex");
      std::vector<EdgeId> out;
      for (MultiedgeId m : dag.out_multiedges(c.id))
        for (int j = 0; j < dag.k(); ++j) out.push_back(dag.first_edge(m) + j);
      const auto in = dag.in_edges(c.id);
      return vertex_step(dag, w, in, out, floor);
    }
  }
  return false;
}

StepResult project_constraint(const KDag& dag, std::span<const double> w_hat, Constraint c,
                              double floor) {
  StepResult r{std::vector<double>(w_hat.begin(), w_hat.end()), false};
  r.skipped = !apply_projection_step(dag, r.w, c, floor);
  return r;
}

ProjectionResult project_kflow(const KDag& dag, std::span<const double> w_hat,
                               const ProjectionConfig& cfg, const SweepObserver& observer) {
  cfg.validate();
  if (w_hat.size() != dag.num_edges()) throw InvalidArgument("project_kflow: wrong dimension");
  const Layout layout(dag);

  ProjectionResult result;
  std::vector<double> w(w_hat.begin(), w_hat.end());
  for (double& x : w) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidArgument("project_kflow: weights must be finite and >= 0");
    x = std::max(x, cfg.floor);
  }

  double residual = kflow_residuals(dag, w).max();
  while (residual >= cfg.tol && result.cycles < cfg.max_cycles) {
    source_step(dag, w, layout.source_out, cfg.floor);
    for (MultiedgeId m = 0; m < dag.num_multiedges(); ++m) multiedge_step(dag, w, m, cfg.floor);
    for (VertexId v : layout.internal)
      if (!vertex_step(dag, w, layout.in_edges[v], layout.out_edges[v], cfg.floor))
        ++result.skipped_steps;
    ++result.cycles;
    if (observer) observer(result.cycles, w);
    residual = kflow_residuals(dag, w).max();
  }

  result.converged = residual < cfg.tol;
  result.mean.w = std::move(w);
  result.mean.residual = residual;
  result.mean.approximate = !result.converged || residual > cfg.exact_threshold;
  return result;
}

std::vector<double> ch_loss_update(std::span<const double> w, std::span<const double> edge_losses,
                                   double eta) {
  if (w.size() != edge_losses.size()) throw InvalidArgument("ch_loss_update: dimension mismatch");
  std::vector<double> out(w.size());
  for (std::size_t e = 0; e < w.size(); ++e) out[e] = w[e] * std::exp(-eta * edge_losses[e]);
  return out;
}

MeanVector ch_init(const KDag& dag, const ProjectionConfig& cfg) {
  const double v = static_cast<double>(dag.num_vertices());
  const std::vector<double> start(dag.num_edges(), 1.0 / (v * v));
  ProjectionResult r = project_kflow(dag, start, cfg);
  if (!r.converged)
    throw ConvergenceError("ch_init: projection did not converge within " +
                               std::to_string(cfg.max_cycles) + " cycles",
                           r.mean.residual);
  return std::move(r.mean);
}

MeanVector ch_init_cached(const KDag& dag, const ProjectionConfig& cfg,
                          const std::string& cache_dir) {
  namespace fs = std::filesystem;
  using nlohmann::json;
  const std::uint64_t hash = kdag_content_hash(dag);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  const std::string hash_text(hex);
  const fs::path path = fs::path(cache_dir) / ("chinit-" + hash_text + ".json");

  if (fs::exists(path)) {
    try {
      std::ifstream in(path);
      const json j = json::parse(in);
      if (j.at("dag_hash").get<std::string>() == hash_text &&
          j.at("weights").size() == dag.num_edges() &&
          j.at("tol").get<double>() <= cfg.tol) {
        MeanVector mv;
        mv.w = j.at("weights").get<std::vector<double>>();
        mv.residual = j.at("residual").get<double>();
        mv.approximate = mv.residual > cfg.exact_threshold;
        return mv;
      }
    } catch (const std::exception&) {
      // Unreadable or stale entry; recompute and overwrite below.
    }
  }

  MeanVector mv = ch_init(dag, cfg);
  std::error_code ec;
  fs::create_directories(cache_dir, ec);
  json j;
  j["dag_hash"] = hash_text;
  j["weights"] = mv.w;
  j["residual"] = mv.residual;
  j["tol"] = cfg.tol;
  j["tool_version"] = kVersion;
  std::ofstream out(path);
  if (out) out << j.dump() << '\n';
  return mv;
}

// ---------------------------------------------------------------------------
// Decomposition and prediction
// ---------------------------------------------------------------------------

std::vector<double> Decomposition::mean(std::size_t num_edges) const {
  std::vector<double> out(num_edges, 0.0);
  if (!(z > 0.0)) return out;
  for (const auto& p : parts)
    for (std::size_t e = 0; e < num_edges; ++e)
      if (p.path.counts[e]) out[e] += p.coefficient / z * p.path.counts[e];
  return out;
}

std::vector<double> Decomposition::reconstruct(std::size_t num_edges) const {
  std::vector<double> out(num_edges, 0.0);
  for (const auto& p : parts)
    for (std::size_t e = 0; e < num_edges; ++e)
      if (p.path.counts[e]) out[e] += p.coefficient * p.path.counts[e];
  return out;
}

Decomposition decompose(const KDag& dag, std::span<const double> w, const DecomposeOptions& opts) {
  if (w.size() != dag.num_edges()) throw InvalidArgument("decompose: wrong dimension");
  const int k = dag.k();
  std::vector<double> r(w.begin(), w.end());
  for (double& x : r)
    if (x <= opts.zero_tol) x = 0.0;

  auto min_weight = [&](MultiedgeId m) {
    double lo = r[dag.first_edge(m)];
    for (int j = 1; j < k; ++j) lo = std::min(lo, r[dag.first_edge(m) + j]);
    return lo;
  };
  auto best_multiedge = [&](VertexId v) -> std::optional<MultiedgeId> {
    std::optional<MultiedgeId> best;
    double best_min = 0.0;
    for (MultiedgeId m : dag.out_multiedges(v)) {
      const double lo = min_weight(m);
      if (lo > best_min) {
        best_min = lo;
        best = m;
      }
    }
    return best;
  };
  auto source_mass = [&] {
    double s = 0.0;
    for (MultiedgeId m : dag.out_multiedges(dag.source())) s += min_weight(m);
    return s;
  };

  Decomposition dec;
  std::vector<std::uint32_t> draws(dag.num_vertices());
  for (std::size_t round = 0; round < dag.num_multiedges(); ++round) {
    if (!best_multiedge(dag.source())) break;

    Multipath pi{std::vector<std::uint32_t>(dag.num_edges(), 0)};
    std::fill(draws.begin(), draws.end(), 0);
    draws[dag.source()] = 1;
    bool stuck = false;
    for (VertexId v : dag.topo_order()) {
      if (dag.is_sink(v) || draws[v] == 0) continue;
      const auto m = best_multiedge(v);
      if (!m) {
        stuck = true;
        break;
      }
      for (int j = 0; j < k; ++j) {
        const EdgeId e = dag.first_edge(*m) + j;
        pi.counts[e] += draws[v];
        draws[dag.edge_to(e)] += draws[v];
      }
    }
    if (stuck) {
      if (opts.partial || source_mass() <= opts.stuck_tol) break;
      throw Error("decompose: stuck at a vertex with positive inflow and no positive multiedge "
                  "(remaining source mass " + std::to_string(source_mass()) + ")");
    }

    double c = std::numeric_limits<double>::infinity();
    EdgeId arg = 0;
    for (EdgeId e = 0; e < dag.num_edges(); ++e)
      if (pi.counts[e] && r[e] / pi.counts[e] < c) {
        c = r[e] / pi.counts[e];
        arg = e;
      }
    for (EdgeId e = 0; e < dag.num_edges(); ++e) {
      if (!pi.counts[e]) continue;
      r[e] -= c * pi.counts[e];
      if (r[e] <= opts.zero_tol) r[e] = 0.0;
    }
    r[arg] = 0.0;
    dec.z += c;
    dec.parts.push_back({c, std::move(pi)});
  }
  return dec;
}

double default_epsilon(const KDag& dag, double tol, std::size_t horizon, double d_bound) {
  const double e = static_cast<double>(dag.num_edges());
  const double v = static_cast<double>(dag.num_vertices());
  const double t = static_cast<double>(std::max<std::size_t>(horizon, 1));
  const double bound = 1.0 / (t * (1.0 + e + (2.0 * v / dag.k()) * (d_bound + 2.0 * e)));
  return std::min(tol * e, bound);
}

Decomposition ch_prediction(const KDag& dag, const MeanVector& w, const ProjectionConfig& cfg) {
  Decomposition dec;
  if (!w.approximate) {
    dec = decompose(dag, w.w);
  } else {
    const double eps = cfg.epsilon.value_or(w.residual * static_cast<double>(dag.num_edges()));
    std::vector<double> lifted(w.w);
    for (double& x : lifted) x += eps;
    DecomposeOptions opts;
    opts.partial = true;
    dec = decompose(dag, lifted, opts);
  }
  if (dec.parts.empty()) throw Error("ch_prediction: empty decomposition");
  return dec;
}

const Multipath& sample_decomposition(const Decomposition& dec, Rng& rng) {
  if (dec.parts.empty()) throw InvalidArgument("sample_decomposition: no parts");
  const double u = uniform01(rng) * dec.z;
  double cum = 0.0;
  for (const auto& p : dec.parts) {
    cum += p.coefficient;
    if (u < cum) return p.path;
  }
  return dec.parts.back().path;
}

Multipath ch_sample(const KDag& dag, const MeanVector& w, const ProjectionConfig& cfg, Rng& rng) {
  const Decomposition dec = ch_prediction(dag, w, cfg);
  return sample_decomposition(dec, rng);
}

}  // namespace odp
