#include "odp/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "odp/dp_core.hpp"
#include "odp/error.hpp"
#include "odp/fpl.hpp"
#include "odp/hedge_expanded.hpp"
#include "odp/problem_config.hpp"
#include "odp/version.hpp"

namespace odp {

using nlohmann::json;

Algorithm parse_algorithm(const std::string& name) {
  if (name == "eh") return Algorithm::Eh;
  if (name == "ch") return Algorithm::Ch;
  if (name == "fpl") return Algorithm::Fpl;
  if (name == "hedge_oracle") return Algorithm::HedgeOracle;
  throw InvalidArgument("unknown algorithm \"" + name + "\" (eh, ch, fpl, hedge_oracle)");
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Eh: return "eh";
    case Algorithm::Ch: return "ch";
    case Algorithm::Fpl: return "fpl";
    case Algorithm::HedgeOracle: return "hedge_oracle";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (horizon < 1) throw InvalidArgument("experiment: T must be >= 1");
  if (eta && !(*eta > 0.0 && std::isfinite(*eta)))
    throw InvalidArgument("experiment: eta must be positive");
  if (!(problem.loss_bound > 0.0) || !(problem.norm_bound > 0.0))
    throw InvalidArgument("experiment: B and D must be positive");
  if (!problem.losses || problem.dag.num_edges() == 0)
    throw InvalidArgument("experiment: no problem");
  if (algorithm == Algorithm::Fpl && problem.kind == "matrix_chain" && !fpl_matrix_chain)
    throw InvalidArgument(
        "experiment: fpl is not run on matrix_chain unless fpl_matrix_chain is set "
        "(multiedge-loss FPL is an extension)");
  if (fpl_scale && !(*fpl_scale >= 0.0)) throw InvalidArgument("experiment: fpl_scale must be >= 0");
  projection.validate();
}

ExperimentConfig experiment_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("experiment config: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.problem = problem_from_json(text);
  cfg.problem_json = json{{"problem", j["problem"]}, {"params", j.value("params", json::object())}}.dump();
  try {
    if (j.contains("algorithm")) cfg.algorithm = parse_algorithm(j["algorithm"].get<std::string>());
    if (j.contains("T")) {
      if (!j["T"].is_number_integer() || j["T"].get<std::int64_t>() < 1)
        throw InvalidArgument("experiment config: T must be a positive integer");
      cfg.horizon = j["T"].get<std::size_t>();
    }
    if (j.contains("eta")) {
      if (j["eta"].is_string()) {
        if (j["eta"].get<std::string>() != "auto")
          throw InvalidArgument("experiment config: eta must be a number or \"auto\"");
      } else {
        cfg.eta = j["eta"].get<double>();
      }
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("adversary")) {
      const json& a = j["adversary"];
      if (a.is_string()) {
        cfg.adversary.kind = parse_adversary_kind(a.get<std::string>());
      } else {
        cfg.adversary.kind = parse_adversary_kind(a.at("kind").get<std::string>());
        cfg.adversary.sequence_file = a.value("file", std::string());
        cfg.adversary.shift_weight = a.value("shift_weight", cfg.adversary.shift_weight);
        cfg.adversary.phases = a.value("phases", cfg.adversary.phases);
      }
    }
    if (j.contains("projection")) {
      const json& p = j["projection"];
      cfg.projection.tol = p.value("tol", cfg.projection.tol);
      cfg.projection.max_cycles = p.value("max_cycles", cfg.projection.max_cycles);
      if (p.contains("epsilon")) cfg.projection.epsilon = p["epsilon"].get<double>();
    }
    if (j.contains("fpl_scale")) cfg.fpl_scale = j["fpl_scale"].get<double>();
    cfg.fpl_matrix_chain = j.value("fpl_matrix_chain", false);
    cfg.cache_dir = j.value("cache_dir", std::string());
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("experiment config: ") + e.what());
  }
  return cfg;
}

namespace {

double log_num_multipaths(const KDag& dag) {
  const MultipathCount n = count_multipaths(dag);
  return n.exact ? std::log(static_cast<double>(*n.exact)) : n.log_count;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Explicit Hedge over an enumerated object list. The prior is proportional
// to each object's derivation multiplicity, which makes it the same
// distribution EH starts from.
class ExplicitHedge {
 public:
  ExplicitHedge(const KDag& dag, double eta) : eta_(eta) {
    const MultipathCount n = count_multipaths(dag);
    if (!n.exact || *n.exact > kHedgeOracleCap)
      throw InvalidArgument("hedge_oracle: more than " + std::to_string(kHedgeOracleCap) +
                            " multipaths");
    objects_ = enumerate_multipaths(dag, kHedgeOracleCap);
    log_w_.reserve(objects_.size());
    for (const auto& pi : objects_) log_w_.push_back(std::log(derivation_multiplicity(dag, pi)));
  }

  std::vector<double> probabilities() const {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : log_w_) mx = std::max(mx, x);
    std::vector<double> p(log_w_.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += p[i] = std::exp(log_w_[i] - mx);
    for (double& x : p) x /= sum;
    return p;
  }

  const std::vector<Multipath>& objects() const { return objects_; }

  void update(std::span<const double> edge_losses) {
    for (std::size_t i = 0; i < objects_.size(); ++i)
      log_w_[i] -= eta_ * multipath_loss(objects_[i], edge_losses);
  }

 private:
  double eta_;
  std::vector<Multipath> objects_;
  std::vector<double> log_w_;
};

}  // namespace

double tune_eta(Algorithm a, std::size_t horizon, const KDag& dag, double loss_bound,
                double norm_bound) {
  if (horizon < 1 || !(loss_bound > 0.0) || !(norm_bound > 0.0))
    throw InvalidArgument("tune_eta: parameters must be positive");
  const double t = static_cast<double>(horizon);
  switch (a) {
    case Algorithm::Eh:
    case Algorithm::HedgeOracle: {
      const double log_n = log_num_multipaths(dag);
      if (!(log_n > 0.0))
        throw InvalidArgument("tune_eta: needs at least two multipaths (N <= 1)");
      return std::sqrt(2.0 * log_n / t) / loss_bound;
    }
    case Algorithm::Ch: {
      const double d = norm_bound;
      const double delta0 =
          2.0 * d * std::log(static_cast<double>(dag.num_vertices())) + d * std::log(d);
      if (!(delta0 > 0.0)) throw InvalidArgument("tune_eta: degenerate dag");
      return std::sqrt(2.0 * delta0 / (t * loss_bound));
    }
    case Algorithm::Fpl:
      break;
  }
  throw InvalidArgument("tune_eta: fpl has a perturbation scale, not a learning rate");
}

double regret_bound(Algorithm a, std::size_t horizon, const ProblemInstance& problem) {
  const double t = static_cast<double>(horizon);
  const double b = problem.loss_bound;
  const double d = problem.norm_bound;
  switch (a) {
    case Algorithm::Eh:
    case Algorithm::HedgeOracle: {
      const double log_n = log_num_multipaths(problem.dag);
      return b * std::sqrt(2.0 * t * log_n) + b * log_n;
    }
    case Algorithm::Ch: {
      const double log_v = std::log(static_cast<double>(problem.dag.num_vertices()));
      const double unit = std::max(1.0, b / d);
      if (problem.bit_vector_multipaths)
        return unit * (d * std::sqrt(4.0 * t * log_v) + 2.0 * d * log_v);
      return unit * (d * std::sqrt(2.0 * t * (2.0 * log_v + std::log(d))) + 2.0 * d * log_v +
                     d * std::log(d));
    }
    case Algorithm::Fpl:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double compute_regret(const Trace& trace) { return trace.cum_loss - trace.l_star; }

Trace run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ProblemInstance& problem = cfg.problem;
  const KDag& dag = problem.dag;
  const std::size_t horizon = cfg.horizon;

  const auto sequence =
      adversary_sequence(cfg.adversary, problem, horizon, derive_cell_seed(cfg.seed, 0));
  Rng rng(derive_cell_seed(cfg.seed, 1));

  Trace trace;
  if (cfg.algorithm == Algorithm::Fpl) {
    trace.eta = cfg.fpl_scale.value_or(
        fpl_default_scale(horizon, problem.norm_bound, problem.num_components));
  } else {
    trace.eta = cfg.eta.value_or(
        tune_eta(cfg.algorithm, horizon, dag, problem.loss_bound, problem.norm_bound));
  }
  const double eta = trace.eta;

  ProjectionConfig projection = cfg.projection;
  if (cfg.algorithm == Algorithm::Ch && !projection.epsilon)
    projection.epsilon = default_epsilon(dag, projection.tol, horizon, problem.norm_bound);
  const double failure_residual = std::max(projection.tol, *projection.epsilon);

  std::optional<MultiedgeWeights> eh;
  std::optional<MeanVector> ch;
  std::optional<FplState> fpl;
  std::optional<ExplicitHedge> oracle;
  switch (cfg.algorithm) {
    case Algorithm::Eh: eh.emplace(eh_init(dag)); break;
    case Algorithm::Ch:
      ch.emplace(cfg.cache_dir.empty() ? ch_init(dag, projection)
                                       : ch_init_cached(dag, projection, cfg.cache_dir));
      break;
    case Algorithm::Fpl: fpl.emplace(fpl_init(dag, eta)); break;
    case Algorithm::HedgeOracle: oracle.emplace(dag, eta); break;
  }

  trace.summed_edge_losses.assign(dag.num_edges(), 0.0);
  trace.records.reserve(horizon);
  const double loss_slack = 1e-9 * problem.loss_max;

  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto start = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.t = t;
    rec.eta = eta;
    try {
      const EdgeLosses loss = lower_edge_losses(dag, problem.losses(sequence[t - 1]));
      Multipath sample;
      double expected = 0.0;
      switch (cfg.algorithm) {
        case Algorithm::Eh: {
          sample = eh_sample(*eh, rng);
          expected = dot(eh_expected_counts(*eh), loss);
          eh = eh_update(*eh, loss, eta);
          break;
        }
        case Algorithm::Ch: {
          const Decomposition dec = ch_prediction(dag, *ch, projection);
          sample = sample_decomposition(dec, rng);
          expected = dot(dec.mean(dag.num_edges()), loss);
          rec.residual = ch->residual;
          if (ch->approximate) ++trace.approximate_trials;
          const ProjectionResult next =
              project_kflow(dag, ch_loss_update(ch->w, loss, eta), projection);
          for (double x : next.mean.w)
            if (!std::isfinite(x)) throw Error("projection produced non-finite weights");
          if (!(next.mean.residual <= failure_residual))
            throw ConvergenceError("projection residual " + std::to_string(next.mean.residual) +
                                       " exceeds both tol and epsilon",
                                   next.mean.residual);
          ch = next.mean;
          break;
        }
        case Algorithm::Fpl: {
          sample = fpl_predict(*fpl, dag, rng);
          fpl_update(*fpl, loss);
          break;
        }
        case Algorithm::HedgeOracle: {
          const auto p = oracle->probabilities();
          const double u = uniform01(rng);
          double cum = 0.0;
          std::size_t pick = p.size();
          for (std::size_t i = 0; i < p.size(); ++i) {
            expected += p[i] * multipath_loss(oracle->objects()[i], loss);
            cum += p[i];
            if (pick == p.size() && u < cum) pick = i;
          }
          if (pick == p.size()) pick = p.size() - 1;
          sample = oracle->objects()[pick];
          oracle->update(loss);
          break;
        }
      }
      rec.realized_loss = multipath_loss(sample, loss);
      rec.loss = cfg.algorithm == Algorithm::Fpl ? rec.realized_loss : expected;
      rec.sample_hash = multipath_hash(sample);
      if (rec.realized_loss < -loss_slack || rec.realized_loss > problem.loss_max + loss_slack)
        throw Error("trial loss " + std::to_string(rec.realized_loss) + " outside [0, " +
                    std::to_string(problem.loss_max) + "]");
      for (std::size_t e = 0; e < loss.size(); ++e) trace.summed_edge_losses[e] += loss[e];
    } catch (const Error& e) {
      throw Error("trial " + std::to_string(t) + ": " + e.what());
    }
    trace.cum_loss += rec.loss;
    trace.realized_cum_loss += rec.realized_loss;
    rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                 .count();
    trace.records.push_back(rec);
  }

  MinSumSolution best = solve_min_sum_edges(dag, trace.summed_edge_losses);
  trace.l_star = best.value;
  trace.best = std::move(best.argmin);
  trace.regret = compute_regret(trace);
  trace.bound = cfg.eta ? std::numeric_limits<double>::quiet_NaN()
                        : regret_bound(cfg.algorithm, horizon, problem);
  trace.within_bound = std::isnan(trace.bound) || trace.regret <= trace.bound;
  return trace;
}

std::vector<Trace> run_cells(const std::vector<ExperimentConfig>& cells, unsigned threads) {
  std::vector<Trace> out(cells.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        out[i] = run_experiment(cells[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "t,loss,cum_loss,eta,residual,sample_hash,ms\n";
  double cum = 0.0;
  char line[256];
  for (const auto& r : trace.records) {
    cum += r.loss;
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%016llx,%.3f\n", r.t, r.loss,
                  cum, r.eta, r.residual, static_cast<unsigned long long>(r.sample_hash), r.ms);
    os << line;
  }
}

std::string trace_summary_json(const ExperimentConfig& cfg, const Trace& trace) {
  json config;
  if (!cfg.problem_json.empty()) {
    const json p = json::parse(cfg.problem_json);
    config["problem"] = p["problem"];
    config["params"] = p["params"];
  } else {
    config["problem"] = cfg.problem.kind;
  }
  config["algorithm"] = algorithm_name(cfg.algorithm);
  config["T"] = cfg.horizon;
  config["eta"] = trace.eta;
  config["eta_mode"] = cfg.algorithm == Algorithm::Fpl
                           ? (cfg.fpl_scale ? "fixed_scale" : "auto_scale")
                           : (cfg.eta ? "fixed" : "auto");
  config["seed"] = cfg.seed;
  config["adversary"] = adversary_name(cfg.adversary.kind);
  config["B"] = cfg.problem.loss_bound;
  config["D"] = cfg.problem.norm_bound;
  if (cfg.algorithm == Algorithm::Ch)
    config["projection"] = {{"tol", cfg.projection.tol},
                            {"max_cycles", cfg.projection.max_cycles},
                            {"epsilon", cfg.projection.epsilon
                                            ? json(*cfg.projection.epsilon)
                                            : json(default_epsilon(cfg.problem.dag, cfg.projection.tol,
                                                                   cfg.horizon, cfg.problem.norm_bound))}};

  json out;
  out["config"] = config;
  out["L_star"] = trace.l_star;
  out["cum_loss"] = trace.cum_loss;
  out["regret"] = trace.regret;
  out["bound"] = std::isnan(trace.bound) ? json(nullptr) : json(trace.bound);
  out["within_bound"] = std::isnan(trace.bound) ? json(nullptr) : json(trace.within_bound);
  out["realized_cum_loss"] = trace.realized_cum_loss;
  out["approximate_trials"] = trace.approximate_trials;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(multipath_hash(trace.best)));
  out["best_hash"] = hash;
  out["tool_version"] = kVersion;
  return out.dump(2);
}

}  // namespace odp
