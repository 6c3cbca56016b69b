#pragma once

#include <filesystem>
#include <iosfwd>

#include "hpinn/config.hpp"
#include "hpinn/hpo.hpp"

namespace hpinn {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

/// Single training run. Writes into config.output:
///   config.json, epochs.csv, summary.json, solution_grid.csv, params.bin,
///   domain_train.csv, domain_test.csv, boundary_train.csv, boundary_test.csv.
int cmd_train(RunConfig config, std::ostream& log);

/// HPO campaign. Writes config.json, trials.csv, best.json, best_params.bin,
/// losses_sorted.csv, best_so_far.csv, gp_log.json and pdp_<dim>.csv.
int cmd_hpo(RunConfig config, std::ostream& log);

/// One HPO campaign per (omega, level) cell under <output>/omega<w>_level<l>,
/// plus <output>/summary.csv.
int cmd_sweep(RunConfig config, std::ostream& log);

/// Campaign plus its directory outputs; used by cmd_hpo and cmd_sweep.
HpoResult run_campaign(const RunConfig& resolved, const std::filesystem::path& dir, std::ostream& log);

}  // namespace hpinn
