// odp: run experiments, query oracles, project and solve from the shell.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "odp/dp_core.hpp"
#include "odp/harness.hpp"
#include "odp/hedge_component.hpp"
#include "odp/kdag_json.hpp"
#include "odp/problem_config.hpp"
#include "odp/version.hpp"

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw odp::InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A config is either a problem ({"problem": ...}) or a raw graph ({"k": ...}).
struct Loaded {
  std::optional<odp::ProblemInstance> problem;
  odp::KDag dag;
};

Loaded load_any(const std::string& path) {
  const std::string text = slurp(path);
  const json j = json::parse(text);
  Loaded out;
  if (j.contains("problem")) {
    out.problem = odp::problem_from_json(text);
    out.dag = out.problem->dag;
  } else {
    out.dag = odp::KDag::build(odp::raw_graph_from_json(text));
  }
  return out;
}

json counts_json(const odp::Multipath& pi) { return pi.counts; }

std::string hex(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

// Edge losses either straight from --edge-losses or through the problem's
// adapter from --losses (a component vector).
odp::EdgeLosses read_edge_losses(const Loaded& in, const std::string& components,
                                 const std::string& edge_losses) {
  if (!edge_losses.empty()) return json::parse(slurp(edge_losses)).get<std::vector<double>>();
  if (components.empty()) throw odp::InvalidArgument("need --losses or --edge-losses");
  if (!in.problem) throw odp::InvalidArgument("--losses needs a problem config");
  const auto c = json::parse(slurp(components)).get<std::vector<double>>();
  return odp::lower_edge_losses(in.dag, in.problem->losses(c));
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed,
            const std::string& algo, const std::string& eta, const std::string& out,
            const std::string& summary_path) {
  odp::ExperimentConfig cfg = odp::experiment_from_json(slurp(config));
  // relative sequence files are looked up next to the config
  auto& file = cfg.adversary.sequence_file;
  if (!file.empty() && std::filesystem::path(file).is_relative())
    file = (std::filesystem::path(config).parent_path() / file).string();
  if (seed) cfg.seed = *seed;
  if (!algo.empty()) cfg.algorithm = odp::parse_algorithm(algo);
  if (!eta.empty()) {
    if (eta == "auto")
      cfg.eta.reset();
    else
      cfg.eta = std::stod(eta);
  }
  const odp::Trace trace = odp::run_experiment(cfg);
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw odp::InvalidArgument("cannot write " + out);
    odp::write_trace_csv(os, trace);
  }
  const std::string summary = odp::trace_summary_json(cfg, trace);
  if (!summary_path.empty()) std::ofstream(summary_path) << summary << "\n";
  std::cout << summary << "\n";
  return trace.within_bound ? 0 : 3;
}

int cmd_oracle(const std::string& config, const std::string& mode, const std::string& components,
               const std::string& edge_losses, std::size_t cap) {
  const Loaded in = load_any(config);
  const odp::KDag& dag = in.dag;
  json out;
  if (mode == "count") {
    const auto n = odp::count_multipaths(dag);
    out["count"] = n.exact ? json(*n.exact) : json(nullptr);
    out["log_count"] = n.log_count;
    out["vertices"] = dag.num_vertices();
    out["edges"] = dag.num_edges();
    out["multiedges"] = dag.num_multiedges();
  } else if (mode == "enumerate") {
    json list = json::array();
    for (const auto& pi : odp::enumerate_multipaths(dag, cap))
      list.push_back({{"hash", hex(odp::multipath_hash(pi))}, {"counts", counts_json(pi)}});
    out["multipaths"] = list;
  } else if (mode == "brute") {
    const auto loss = read_edge_losses(in, components, edge_losses);
    const auto all = odp::enumerate_multipaths(dag, cap);
    std::size_t best = 0;
    for (std::size_t i = 1; i < all.size(); ++i)
      if (odp::multipath_loss(all[i], loss) < odp::multipath_loss(all[best], loss)) best = i;
    const auto dp = odp::solve_min_sum_edges(dag, loss);
    out["brute_value"] = odp::multipath_loss(all[best], loss);
    out["brute_argmin"] = counts_json(all[best]);
    out["dp_value"] = dp.value;
    out["agree"] = dp.value == out["brute_value"].get<double>();
    out["objects"] = all.size();
  } else {
    throw odp::InvalidArgument("unknown oracle mode \"" + mode + "\" (count, enumerate, brute)");
  }
  std::cout << out.dump(2) << "\n";
  return out.value("agree", true) ? 0 : 3;
}

int cmd_project(const std::string& config, const std::string& weights, double tol,
                std::size_t max_cycles) {
  const Loaded in = load_any(config);
  odp::ProjectionConfig pc;
  pc.tol = tol;
  pc.max_cycles = max_cycles;
  std::vector<double> w_hat;
  if (weights.empty()) {
    const double v = static_cast<double>(in.dag.num_vertices());
    w_hat.assign(in.dag.num_edges(), 1.0 / (v * v));
  } else {
    w_hat = json::parse(slurp(weights)).get<std::vector<double>>();
    if (w_hat.size() != in.dag.num_edges())
      throw odp::InvalidArgument("weights: expected " + std::to_string(in.dag.num_edges()) +
                                 " entries");
  }
  const auto r = odp::project_kflow(in.dag, w_hat, pc);
  const auto res = odp::kflow_residuals(in.dag, r.mean.w);
  json out{{"weights", r.mean.w},
           {"cycles", r.cycles},
           {"converged", r.converged},
           {"residual", {{"source", res.source}, {"multiedge", res.multiedge}, {"vertex", res.vertex}}}};
  std::cout << out.dump(2) << "\n";
  return r.converged ? 0 : 3;
}

int cmd_solve(const std::string& config, const std::string& components,
              const std::string& edge_losses) {
  const Loaded in = load_any(config);
  const auto loss = read_edge_losses(in, components, edge_losses);
  const auto sol = odp::solve_min_sum_edges(in.dag, loss);
  json chosen = json::array();
  for (odp::MultiedgeId m = 0; m < in.dag.num_multiedges(); ++m) {
    const auto c = sol.argmin.multiedge_count(in.dag, m);
    if (c == 0) continue;
    json targets = json::array();
    for (auto u : in.dag.multiedge_targets(m)) targets.push_back(in.dag.vertex_name(u));
    chosen.push_back({{"id", m},
                      {"from", in.dag.vertex_name(in.dag.multiedge_from(m))},
                      {"targets", targets},
                      {"count", c}});
  }
  json out{{"value", sol.value},
           {"hash", hex(odp::multipath_hash(sol.argmin))},
           {"counts", counts_json(sol.argmin)},
           {"multiedges", chosen}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online learning over dynamic-programming dags"};
  app.set_version_flag("--version", std::string(odp::kVersion));
  app.require_subcommand(1);

  std::string config, out, algo, eta, summary, mode = "count", components, edge_losses, weights;
  std::optional<std::uint64_t> seed;
  std::size_t cap = odp::kDefaultEnumerationCap, max_cycles = 10'000;
  double tol = 1e-10;

  auto* run = app.add_subcommand("run", "run one experiment and print its JSON summary");
  run->add_option("--config", config, "experiment JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "overrides the config seed");
  run->add_option("--algo", algo, "eh, ch, fpl or hedge_oracle");
  run->add_option("--eta", eta, "learning rate or \"auto\"");
  run->add_option("--out", out, "trace CSV path");
  run->add_option("--summary", summary, "also write the summary JSON here");

  auto* oracle = app.add_subcommand("oracle", "count, enumerate or brute-force multipaths");
  oracle->add_option("--config", config, "problem or graph JSON")->required()->check(CLI::ExistingFile);
  oracle->add_option("--mode", mode, "count, enumerate or brute");
  oracle->add_option("--losses", components, "JSON array of adversary components");
  oracle->add_option("--edge-losses", edge_losses, "JSON array of per-edge losses");
  oracle->add_option("--cap", cap, "enumeration cap");

  auto* project = app.add_subcommand("project", "project weights onto the k-flow polytope");
  project->add_option("--config", config, "problem or graph JSON")->required()->check(CLI::ExistingFile);
  project->add_option("--weights", weights, "JSON array of positive edge weights (default 1/|V|^2)");
  project->add_option("--tol", tol, "residual tolerance");
  project->add_option("--max-cycles", max_cycles, "sweep cap");

  auto* solve = app.add_subcommand("solve", "offline min-sum solution");
  solve->add_option("--config", config, "problem or graph JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--losses", components, "JSON array of adversary components");
  solve->add_option("--edge-losses", edge_losses, "JSON array of per-edge losses");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config, seed, algo, eta, out, summary);
    if (*oracle) return cmd_oracle(config, mode, components, edge_losses, cap);
    if (*project) return cmd_project(config, weights, tol, max_cycles);
    if (*solve) return cmd_solve(config, components, edge_losses);
  } catch (const odp::ValidationFailed& e) {
    std::cerr << "odp: invalid graph\n" << e.report().summary() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "odp: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
