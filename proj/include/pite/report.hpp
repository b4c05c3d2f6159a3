#pragma once

#include <string>
#include <vector>

#include "pite/harness.hpp"

namespace pite::report {

// Serialization of run outputs. All numeric fields go through
// io::format_double, so files are byte-stable and round-trip exactly.
std::vector<std::string> results_csv(const std::vector<harness::ResultRow>& rows);
std::vector<std::string> aggregates_csv(const std::vector<harness::AggregateRow>& rows);
std::vector<std::string> zones_csv(const std::vector<harness::ResultRow>& rows);
std::vector<std::string> complexity_csv(const std::vector<harness::ComplexityRow>& rows,
                                        const std::vector<std::string>& learner_names);
std::vector<std::string> pairs_csv(const std::vector<harness::PairRecord>& records);

// Writes results.csv, aggregates.csv, zones.csv, complexity.csv under dir.
void write_run_outputs(const std::string& dir, const harness::GridResult& result);

// Derived report tables, built purely from a run's results.csv/complexity.csv:
//   failure_table.csv      scenario x learner medians inside the failure zone
//   success_conditions.csv per scenario x learner success incidence
//   scatter.csv            median rmse/dir per scenario x learner with zone tag
//   zone_rects.csv         the threshold rectangles per mode, for plotting
//   complexity_table.csv   consensus-class accuracy pooled over replications
void write_report(const std::string& results_dir);

}  // namespace pite::report
