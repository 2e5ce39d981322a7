#pragma once
// Fairness and revenue metrics, price-cap sweeps across the three market
// designs, and the constraint-count complexity calculator.

#include <string>
#include <vector>

#include "iotmarket/orchestrator.hpp"

namespace iotmarket {

/// Jain fairness index over the three provider-side class totals:
/// (sum)^2 / (3 * sum of squares). Scale- and permutation-invariant,
/// equals 1 iff all three are equal. Throws std::invalid_argument when
/// all three are zero (the index is undefined there).
double jain_index(double phi_isp, double phi_inp, double phi_sens);

/// Printed constraint-count formulas for the block subproblems.
///
/// assignment_constraint_count is the published codebook-stage formula
/// taken literally, cross-provider product factors included; it counts the
/// binary-expansion constraints of the original combinatorial problem, so
/// it does not match the rows of the relaxed builder (emitted_row_counts
/// reports what the builder actually produces; the calculator never papers
/// over the gap). power_constraint_count is sum B_i + 2S + U and does match
/// the power builder row for row. share_constraint_count is S(2V + U + 2).
long long assignment_constraint_count(const Topology& t);
long long power_constraint_count(const Topology& t);
long long share_constraint_count(const Topology& t);

/// Constraint total of one (approach, block) cell: the base block count
/// plus the approach surcharge. The fairness design adds its epigraph rows
/// (+3 on assignment and power, +2 on shares, price count 3); the
/// conventional design adds its floor rows (+I+V+9 on assignment, power,
/// and price, +V+7 on shares); the weighted-sum price step is closed-form
/// (count 0).
long long complexity_delta(Approach approach, Block block, const Topology& t);

/// Predicted interior-point iteration count for a subproblem with delta
/// constraint rows: log(delta / (t0 * stop)) / log(accuracy_update), the
/// standard barrier-stage bound. Returns 0 for delta == 0.
double ipm_iteration_estimate(long long delta, double t0 = 1.0,
                              double stop = 1e-6,
                              double accuracy_update = 10.0);

/// Rows actually emitted by the block builders for a scenario, measured on
/// the deterministic initial allocation with the plain weighted objective.
/// power matches power_constraint_count exactly; assignment and data_share
/// differ from the printed formulas (see above) and are reported so the
/// difference stays visible.
struct EmittedRowCounts {
  int assignment = 0;
  int power = 0;
  int data_share = 0;
};
EmittedRowCounts emitted_row_counts(const Scenario& s);

/// One (approach, price-cap) cell of a sweep. failed marks a cell whose
/// run threw or came back infeasible; its metric fields are not meaningful.
struct SweepCell {
  Approach approach = Approach::weight_one;
  double l_max = 0.0;
  double phi_isp = 0.0, phi_inp = 0.0, phi_sens = 0.0, phi_user = 0.0;
  double sum = 0.0;
  double jain = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  bool converged = false;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<double> grid;
  std::vector<SweepCell> cells;  // approach-major, grid order within
};

/// Rerun each approach at every price cap in the grid. The scenario is
/// copied per point with economics.price_cap replaced, which re-bounds all
/// six price families; everything else, the channel draw included, stays
/// fixed, so cells are deterministic given the base scenario and options.
/// A failing cell is recorded and the sweep continues. Throws
/// std::invalid_argument for an empty or non-ascending grid.
SweepResult sweep_lmax(const Scenario& base, const std::vector<double>& grid,
                       const std::vector<Approach>& approaches,
                       const RunOptions& opts);

}  // namespace iotmarket
