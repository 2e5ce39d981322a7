#pragma once
// Command-line front end. Subcommands: run (one approach, writes
// run_report.csv and allocation.csv), sweep (price-cap grid over one or
// all approaches, writes sweep.csv), complexity (constraint-count matrix,
// writes complexity.csv), validate (scenario audit). Every flag can also
// be set through an IOTMARKET_-prefixed environment variable.
// Exit codes: 0 success, 1 usage error, 2 infeasible, 3 solver failure.

namespace iotmarket {

int run_cli(int argc, const char* const* argv);

}  // namespace iotmarket
