#pragma once

#include <filesystem>
#include <vector>

#include "pqbbh_harness/config.hpp"
#include "pqbbh_harness/discrepancy.hpp"

namespace pqbbh::harness {

struct RunResult
{
    std::vector<std::filesystem::path> files;
    DiscrepancyReport discrepancies;
};

/// Executes one experiment and writes its CSV files (always including
/// discrepancies.csv) into config.out.  Throws ConfigError for inputs that
/// only fail once evaluated and IoError for unwritable output.
RunResult run(const ExperimentConfig& config);

/// Fixed reference probes for every printed formula with a known mismatch.
/// Included in every run's discrepancies.csv.
DiscrepancyReport standard_probes(ArithmeticMode mode, int resolution);

} // namespace pqbbh::harness
