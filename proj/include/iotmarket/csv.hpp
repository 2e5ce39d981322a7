#pragma once
// CSV artifacts: convergence reports, final allocations, sweep tables, and
// the complexity matrix. Floating values are rendered in shortest
// round-trip form, so equal inputs produce byte-equal files. The wall-time
// column of the sweep table is masked to 0 for the same reason; measured
// timings go to the console instead.

#include <string>

#include "iotmarket/evaluation.hpp"

namespace iotmarket {

/// Canonical CLI spellings: "weight-one", "max-min", "conventional".
std::string approach_name(Approach a);

/// Shortest round-trip decimal form of v ("nan"/"inf" spelled out).
std::string format_number(double v);

/// One row per outer iteration: iteration, objective, the four class
/// totals, and the Jain index of the provider-side totals (empty cell when
/// all three are zero).
std::string run_report_csv(const RunReport& rep);

/// Long-format dump of a final allocation: var, up to three index columns,
/// value. Covers both assignment indicator families, both power families,
/// all six price families, and the data shares.
std::string allocation_csv(const Scenario& s, const Allocation& a);

/// approach, l_max, the four class totals, sum, jain, iters, ms, status.
/// status is "ok" or "failed"; failed rows keep whatever fields were
/// recorded before the cell gave up.
std::string sweep_csv(const SweepResult& r);

/// approach, block, delta, ipm_iters for the 12 subproblem cells.
std::string complexity_csv(const Topology& t);

/// Write content to path, creating parent directories. Throws
/// std::runtime_error naming the path on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace iotmarket
