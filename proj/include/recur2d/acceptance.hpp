#pragma once

#include <string>
#include <vector>

#include "recur2d/experiment.hpp"

namespace recur2d {

inline constexpr int kCriterionCount = 15;

/// Short name of criterion id (1-based).
const std::string& criterion_title(int id);

/// The shipped acceptance suite.
Json default_acceptance_config();
/// Reduced suite used by the reproducibility criterion.
Json smoke_acceptance_config();

/// Runs the criteria selected by options.only (all when empty) and appends
/// results, artifacts and summary entries to `out`.
void run_acceptance(const ExperimentConfig& config, const RunOptions& options, RunResult& out);

}  // namespace recur2d
