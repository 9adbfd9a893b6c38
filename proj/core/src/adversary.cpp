#include "odp/adversary.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "odp/error.hpp"

namespace odp {

AdversaryKind parse_adversary_kind(const std::string& name) {
  if (name == "iid_dirichlet") return AdversaryKind::IidDirichlet;
  if (name == "fixed_sequence_file") return AdversaryKind::FixedSequenceFile;
  if (name == "piecewise_shift") return AdversaryKind::PiecewiseShift;
  throw InvalidArgument("unknown adversary \"" + name + "\"");
}

const char* adversary_name(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::IidDirichlet: return "iid_dirichlet";
    case AdversaryKind::FixedSequenceFile: return "fixed_sequence_file";
    case AdversaryKind::PiecewiseShift: return "piecewise_shift";
  }
  return "?";
}

namespace {

std::vector<std::vector<double>> read_sequence(const std::string& path, std::size_t horizon,
                                               std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("adversary: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("adversary: " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("trials") || !j["trials"].is_array())
    throw InvalidArgument("adversary: " + path + " must hold {\"trials\": [[...], ...]}");
  const auto& rows = j["trials"];
  if (rows.size() < horizon)
    throw InvalidArgument("adversary: " + path + " has " + std::to_string(rows.size()) +
                          " trials, need " + std::to_string(horizon));
  std::vector<std::vector<double>> out;
  out.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    auto row = rows[t].get<std::vector<double>>();
    if (row.size() != dim)
      throw InvalidArgument("adversary: trial " + std::to_string(t + 1) + " has " +
                            std::to_string(row.size()) + " components, expected " +
                            std::to_string(dim));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> adversary_sequence(const AdversaryConfig& cfg,
                                                    const ProblemInstance& problem,
                                                    std::size_t horizon, std::uint64_t seed) {
  if (cfg.kind == AdversaryKind::FixedSequenceFile)
    return read_sequence(cfg.sequence_file, horizon, problem.num_components);

  Rng rng(seed);
  std::vector<std::vector<double>> out;
  out.reserve(horizon);
  if (cfg.kind == AdversaryKind::IidDirichlet) {
    for (std::size_t t = 0; t < horizon; ++t) out.push_back(problem.draw_iid(rng));
    return out;
  }

  if (!(cfg.shift_weight >= 0.0 && cfg.shift_weight <= 1.0) || cfg.phases == 0)
    throw InvalidArgument("adversary: piecewise_shift needs shift_weight in [0,1] and phases >= 1");
  const std::size_t phase_len = std::max<std::size_t>(1, horizon / cfg.phases);
  std::vector<double> profile;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (t % phase_len == 0) profile = problem.draw_iid(rng);
    std::vector<double> x = problem.draw_iid(rng);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = cfg.shift_weight * profile[i] + (1.0 - cfg.shift_weight) * x[i];
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace odp
