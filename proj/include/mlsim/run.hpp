#pragma once

#include "mlsim/config.hpp"
#include "mlsim/epidemic.hpp"
#include "mlsim/output.hpp"
#include "mlsim/pollution.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mlsim {

using EpidemicObserver = std::function<void(const EpidemicSimulation&, const EpidemicStepReport&)>;
using PollutionObserver = std::function<void(const PollutionSimulation&, const PollutionStepReport&)>;

/// Runs config.steps epidemic steps. Rows: the initial census at step 0 and
/// the post-move census of every city after each step.
OutputTable run_epidemic(const RunConfig& config, const EngineOptions& options = {},
                         const EpidemicObserver& observer = {});

/// Runs config.steps pollution steps. One row per step (step 0 is the
/// initial state) for the grid node.
OutputTable run_pollution(const RunConfig& config, const std::optional<std::filesystem::path>& exchange_dir = {},
                          const PollutionObserver& observer = {});

/// Command-line entry point: `mlsim <epidemic|pollution> [options]`.
/// Returns 0 on success, 2 on usage errors, 1 on runtime errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mlsim
