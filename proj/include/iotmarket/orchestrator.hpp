#pragma once
// Alternating block optimization over prices, data selection, powers, and
// codebooks. One shared loop drives the three market designs: weighted-sum,
// fairness (epigraph max-min), and the two-phase conventional procedure.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "iotmarket/convex_kernel.hpp"
#include "iotmarket/link.hpp"

namespace iotmarket {

enum class Approach { weight_one, max_min, conventional };
enum class CentralScalarization { max_min, weight_one };

/// Revenue floors the conventional procedure guarantees the non-optimizing
/// players in phase 1. NaN fields are resolved to 25% of the matching
/// weight-one totals from a calibration run; -inf drops the floor.
struct ConventionalMinima {
  static constexpr double kAuto = std::numeric_limits<double>::quiet_NaN();
  static constexpr double kNone = -std::numeric_limits<double>::infinity();

  double isp_total = kAuto;
  double user_total = kAuto;
  double sensor_total = kAuto;
  double inp_total = kAuto;
  double per_inp = kAuto;  // every single InP's revenue
  double per_isp = kAuto;  // every single ISP's revenue
};

struct RunOptions {
  Approach approach = Approach::weight_one;
  int max_outer_iters = 50;
  double rel_tol = 1e-4;
  std::uint64_t seed = 0;  // recorded for reproducibility bookkeeping
  /// Weighted-sum coefficients; empty vectors mean the scenario's omegas.
  RevenueWeights weights;
  ConventionalMinima minima;
  CentralScalarization central = CentralScalarization::max_min;
  InnerOptions inner;
};

struct RunReport {
  std::vector<double> trace;  // trace[0] is the starting objective
  std::vector<PlayerRevenues> revenue_trace;  // parallel to trace
  Allocation final_alloc;
  PlayerRevenues revenues;
  ConstraintReport audit;
  bool converged = false;
  bool infeasible = false;
  int iterations = 0;
  double wall_ms = 0.0;
  std::vector<std::string> warnings;
  std::string message;  // infeasibility detail, empty otherwise
};

/// One block update: propose a successor allocation from the current one.
/// The loop re-evaluates the true objective at the proposal and rejects
/// decreases, so a solver may be approximate without breaking monotonicity.
using BlockSolver = std::function<Allocation(
    const Scenario&, const LinkContext&, const Allocation&,
    const ScalarizedObjective&, const InnerOptions&)>;

/// Everything the loop needs. Null solvers fall back to the built-in
/// subproblem builders; skip_price freezes the price vector, which is how
/// the conventional phase 2 runs at fixed reported prices.
struct ProblemBinding {
  const Scenario* scenario = nullptr;
  ScalarizedObjective form;
  bool skip_price = false;
  InnerOptions inner;
  BlockSolver price_solver, alpha_solver, power_solver, codebook_solver;
  /// Optional outer-loop cutoff, called after each iteration with the
  /// current allocation and the iteration number. Returning true ends the
  /// loop without setting `converged`; the objective tolerance still wins
  /// when it triggers first.
  std::function<bool(const Allocation&, int)> early_stop;
};

/// Deterministic feasible start: each user associates with its nearest BS
/// and each entity takes the first codebook the reuse limit admits; every
/// link carries a uniform power small enough that any selection respects
/// the caps; alpha = 1; prices at mid-box. If a rate floor still fails the
/// powers are scaled up toward the caps a few times before giving up.
Allocation initial_allocation(const Scenario& s,
                              std::vector<std::string>* warnings = nullptr);

/// Shared engine. From `start`, repeat price, alpha, power, codebook block
/// updates; after each block the true objective is re-evaluated and a
/// decrease beyond 1e-9 rejects that block's proposal (warning recorded),
/// so the per-iteration trace is non-decreasing. Stops once the relative
/// trace change drops below rel_tol (checked from the second iteration) or
/// the iteration budget runs out. The final allocation is audited; audit
/// failures flag the report infeasible rather than pass silently.
RunReport alternating_loop(const ProblemBinding& problem,
                           const Allocation& start, const RunOptions& opts);

/// Maximize the omega-weighted sum of all player revenues.
RunReport run_weight_one(const Scenario& s, const RunOptions& opts = {});

/// Maximize t + total user revenue subject to each provider-side class
/// total (ISP, InP, sensor) staying >= t; the epigraph scalar rides along
/// in every block.
RunReport run_max_min(const Scenario& s, const RunOptions& opts = {});

/// Two phases: each InP, each ISP, and the sensor owner separately maximize
/// their own revenue under the minima floors, and keep only their own price
/// families from the result; a central phase then re-solves powers, shares,
/// and codebooks at the assembled fixed prices. The report covers phase 2.
RunReport run_conventional(const Scenario& s, const RunOptions& opts = {});

/// Dispatch on opts.approach.
RunReport run_approach(const Scenario& s, const RunOptions& opts = {});

}  // namespace iotmarket
