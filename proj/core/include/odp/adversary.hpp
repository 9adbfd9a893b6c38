#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "odp/problems.hpp"

namespace odp {

enum class AdversaryKind { IidDirichlet, FixedSequenceFile, PiecewiseShift };

struct AdversaryConfig {
  AdversaryKind kind = AdversaryKind::IidDirichlet;
  std::string sequence_file;   // FixedSequenceFile: {"trials": [[...], ...]}
  double shift_weight = 0.8;   // PiecewiseShift: weight of the phase profile
  std::size_t phases = 5;      // PiecewiseShift: profile changes every floor(T/phases) trials
};

AdversaryKind parse_adversary_kind(const std::string& name);
const char* adversary_name(AdversaryKind kind);

/// The whole (oblivious) sequence of component vectors for T trials.
///  - iid_dirichlet: T independent draws of problem.draw_iid;
///  - fixed_sequence_file: the first T rows of the file;
///  - piecewise_shift: each phase draws one profile and every trial plays
///    shift_weight * profile + (1 - shift_weight) * fresh draw, so the best
///    object moves between phases.
std::vector<std::vector<double>> adversary_sequence(const AdversaryConfig& cfg,
                                                    const ProblemInstance& problem,
                                                    std::size_t horizon, std::uint64_t seed);

}  // namespace odp
