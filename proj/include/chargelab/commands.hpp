#pragma once

// The experiments behind the command-line tool. Each command writes its files
// under cfg.out, prints one line per check to `log` and the failures to `err`,
// and returns the process exit code.

#include <ostream>
#include <string>
#include <vector>

#include "chargelab/config.hpp"
#include "chargelab/inequality.hpp"

namespace chargelab {

enum ExitCode : int { kExitOk = 0, kExitFailures = 1, kExitInvalidConfig = 2, kExitNumericalFailure = 3 };

// Grid resolution used when the config leaves it at 0.
int default_grid(const ExperimentConfig& cfg);

// Names accepted by verify's "case".
const std::vector<std::string>& verify_case_names();

// The reports of one verify run, without writing files.
std::vector<InequalityReport> verify_reports(const ExperimentConfig& cfg);

int run_verify(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);
int run_stechkin_curve(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);
int run_recover(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);
int run_sharpness_search(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

// Dispatches on cfg.command and maps exceptions to exit codes: configuration
// and argument errors give 2, numerical failures 3.
int run_command(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace chargelab
