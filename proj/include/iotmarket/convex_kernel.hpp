#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "iotmarket/economics.hpp"
#include "iotmarket/link.hpp"

namespace iotmarket {

/// Sparse affine expression c0 + sum coef_k * x[idx_k] over a block's
/// variables. Duplicate indices are allowed and sum.
struct LinExpr {
  double c0 = 0.0;
  std::vector<std::pair<int, double>> terms;

  void add(int idx, double coef) {
    if (coef != 0.0) terms.emplace_back(idx, coef);
  }
  double eval(const std::vector<double>& x) const {
    double v = c0;
    for (const auto& [i, c] : terms) v += c * x[i];
    return v;
  }
};

/// weight * ln(arg), weight > 0 and arg affine, so the term is concave.
struct LogTerm {
  double weight = 0.0;
  LinExpr arg;
};

/// -weight * expr^2, weight >= 0 and expr affine. Sums of these express any
/// concave quadratic through a Cholesky factor.
struct QuadTerm {
  double weight = 0.0;
  LinExpr expr;
};

/// Concave objective or constraint expression: affine part, positive
/// multiples of logarithms of affine forms, and negated squares of affine
/// forms. Evaluates to -inf outside the domain of any logarithm.
struct ConcaveModel {
  LinExpr linear;
  std::vector<LogTerm> logs;
  std::vector<QuadTerm> quads;

  double eval(const std::vector<double>& x) const;
  /// grad += scale * gradient at x. x must be inside the log domains.
  void add_gradient(const std::vector<double>& x, double scale,
                    std::vector<double>& grad) const;
};

enum class Sense { le, ge };

/// Affine constraint row: expr (<=|>=) rhs, expr.c0 folded into the value.
struct LinearRowSpec {
  LinExpr row;
  Sense sense = Sense::le;
  double rhs = 0.0;
  std::string label;
};

/// Concave constraint row: expr >= rhs. Feasible sets of this shape stay
/// convex, which is what the epigraph and rate-floor rows need.
struct ConcaveRowSpec {
  ConcaveModel expr;
  double rhs = 0.0;
  std::string label;
};

enum class Block { price, alpha, power, codebook };

/// Decoder from subproblem coordinates back to Allocation storage.
struct BlockLayout {
  Block block = Block::price;
  int dim = 0;
  int t_index = -1;          // epigraph scalar, -1 when absent
  std::vector<int> dl_vars;  // power block: var k -> flat DL link index
  std::vector<int> ul_vars;  // power block: var (dl_vars.size()+k) -> UL flat
  int alpha_offset = 0;      // alpha block: [alpha | delta | beta]
  int delta_offset = -1;
  int beta_offset = -1;
  int n_alpha = 0, n_delta = 0, n_beta = 0;
};

/// One block subproblem: maximize a concave model over box bounds, affine
/// rows, and concave rows. Box bounds are finite in every coordinate.
struct SubproblemSpec {
  Block block = Block::price;
  int dim = 0;
  ConcaveModel objective;
  std::vector<LinearRowSpec> linear_rows;
  std::vector<ConcaveRowSpec> concave_rows;
  std::vector<double> lower, upper;
  std::vector<double> warm;
  BlockLayout layout;

  int row_count() const {
    return static_cast<int>(linear_rows.size() + concave_rows.size());
  }
};

struct InnerOptions {
  double barrier_t0 = 1.0;
  double barrier_scale = 10.0;   // multiplier between barrier stages
  double gap_stop = 1e-8;        // stop once (row + box count) / t <= this
  int max_stages = 24;
  int max_newton = 80;           // per stage
  double newton_tol = 1e-10;     // on the squared Newton decrement
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  double slack_penalty = 1e6;    // feasibility restoration weight
};

struct InnerResult {
  std::vector<double> x;
  bool converged = false;
  double objective = 0.0;      // model objective at x
  double kkt_residual = 0.0;   // gap proxy plus scaled stationarity residual
  double max_violation = 0.0;  // worst original-row or box violation at x
  double restored_slack = 0.0; // residual slack if restoration was engaged
  int stages = 0;
  int newton_steps = 0;
  std::string message;
};

/// Log-barrier interior-point maximization of spec over its rows and box.
/// Rows infeasible at the warm start are relaxed with penalized slacks; the
/// residual slack is reported instead of silently failing.
InnerResult inner_solve(const SubproblemSpec& spec,
                        const InnerOptions& opts = {});

/// One rate term r = log2(f_arg) - log2(g_arg) with both arguments affine in
/// the block variables (signal+interference+noise and interference+noise).
struct DCRateTerm {
  int bs = -1, user = -1, sensor = -1, codebook = -1;
  int flat = -1;  // AllocShape index in the term's own direction
  LinExpr f_arg, g_arg;
  double g_at_anchor = 0.0;  // log2(g_arg(anchor))
  std::vector<std::pair<int, double>> g_grad;  // gradient of log2(g_arg)
  double surr_const = 0.0;   // -g_at_anchor + g_grad . anchor, precomputed

  double true_rate(const std::vector<double>& p) const;
  /// f-branch minorant: log2(f_arg) - tangent of log2(g_arg) at the anchor.
  /// Touches true_rate at the anchor exactly.
  double surrogate(const std::vector<double>& p) const;
};

/// Linearization state for one direction's rate terms at a power anchor.
struct DCLinearization {
  std::vector<double> anchor;
  std::vector<DCRateTerm> terms;
};

/// Build the rate linearization over the full flat DL power vector. Terms
/// are emitted for links with a positive assignment indicator; gradient
/// entries exist only for same-provider cross-BS interferer powers.
DCLinearization dc_linearize_downlink(const Scenario& s, const Allocation& a,
                                      const std::vector<double>& anchor);
DCLinearization dc_linearize_uplink(const Scenario& s, const Allocation& a,
                                    const std::vector<double>& anchor);

/// Linear weights over per-entity revenues; the scalarized objectives and
/// every revenue floor row are instances of these.
struct RevenueWeights {
  std::vector<double> inp, isp, sensor, user;

  static RevenueWeights zeros(const Scenario& s);
  /// The scenario's omega vectors.
  static RevenueWeights from_scenario(const Scenario& s);
  static RevenueWeights one_inp(const Scenario& s, int i);
  static RevenueWeights one_isp(const Scenario& s, int v);
  static RevenueWeights all_inps(const Scenario& s);
  static RevenueWeights all_isps(const Scenario& s);
  static RevenueWeights all_sensors(const Scenario& s);
  static RevenueWeights all_users(const Scenario& s);
};

double weighted_sum(const PlayerRevenues& r, const RevenueWeights& w);

/// Revenue floor row: weighted revenues >= rhs, or >= t when vs_t is set
/// (the epigraph rows of the fairness objective).
struct RevenueRow {
  RevenueWeights select;
  double rhs = 0.0;
  bool vs_t = false;
  std::string label;
};

/// One approach's scalarization: maximize weighted revenues (+ t when the
/// epigraph scalar is present) subject to revenue floor rows.
struct ScalarizedObjective {
  RevenueWeights weights;
  bool with_t = false;
  std::vector<RevenueRow> rows;
};

/// Objective value of a scalarized form at a full allocation; t resolves to
/// the minimum of its epigraph rows.
double true_objective(const Scenario& s, const LinkContext& ctx,
                      const Allocation& a, const ScalarizedObjective& form);

/// Build the block subproblem for one scalarized form at the current
/// allocation (which also provides every linearization anchor). Constraint
/// rows carry labels; the power and codebook builders emit one row per
/// structural constraint so their counts can be audited externally.
SubproblemSpec build_block_subproblem(const Scenario& s,
                                      const LinkContext& ctx,
                                      const Allocation& a,
                                      const ScalarizedObjective& form,
                                      Block block);

/// Write a solved block's variables back into the allocation.
void apply_block_solution(const Scenario& s, const BlockLayout& layout,
                          const std::vector<double>& x, Allocation& a);

/// Price step of the weighted-sum problem: the objective is affine in the
/// prices over a box, so each coordinate goes to the bound selected by its
/// coefficient sign. Coefficients within 1e-10 relative of zero are ties
/// the objective cannot see. Under uniform weights every price coordinate
/// ties (transfers cancel), and the step settles the whole face by a fixed
/// market convention (see settle_price_face in block_steps.cpp): provider
/// classes at 3:2:1 margins anchored at the infrastructure income ceiling.
/// Under any other weights tied coordinates price at zero. The two-argument
/// form uses the scenario's omega weights.
PriceVector solve_price_step(const Scenario& s, const Allocation& a);
PriceVector solve_price_step(const Scenario& s, const Allocation& a,
                             const RevenueWeights& weights);

struct AlphaStep {
  std::vector<double> alpha;
  std::vector<double> delta;  // [v * S + s], share epigraph values
  std::vector<double> beta;   // per sensor, reservation epigraph values
  InnerResult info;
};

/// Data-selection step at fixed prices, powers, and codebooks.
AlphaStep solve_alpha_step(const Scenario& s, const Allocation& a,
                           const InnerOptions& opts = {});

struct PowerAnchor {
  std::vector<double> dl, ul;
};

struct PowerStep {
  std::vector<double> dl, ul;  // full flat vectors
  InnerResult info;
  int rows_emitted = 0;
};

/// One successive-approximation pass over the transmit powers: linearize the
/// rate terms at the anchor and maximize the resulting concave model under
/// power caps, battery caps, and surrogate rate floors.
PowerStep solve_power_step(const Scenario& s, const Allocation& a,
                           const PowerAnchor& anchor,
                           const InnerOptions& opts = {});

struct CodebookStep {
  std::vector<double> dl_relaxed, ul_relaxed;
  std::vector<double> dl_rounded, ul_rounded;
  std::vector<int> unassigned_users, unassigned_sensors;
  InnerResult info;
  int rows_emitted = 0;
};

/// Codebook step: relax the indicators to [0,1], maximize the linearized
/// model under association pairs, reuse limits, caps, and surrogate rate
/// floors, then round greedily by decreasing relaxed value (ties to the
/// lowest index), skipping choices that would break a reuse limit.
CodebookStep solve_codebook_step(const Scenario& s, const Allocation& a,
                                 const InnerOptions& opts = {});

/// Greedy rounding used by the codebook step, exposed for reuse by the
/// initializer. Assigns each user and sensor its best available pair and
/// reports entities left unassigned because every option was blocked.
/// Relaxed values are quantized to 1e-9 before comparison, so numerical
/// near-ties resolve to the lowest index deterministically.
void round_codebooks(const Scenario& s, const std::vector<double>& dl_relaxed,
                     const std::vector<double>& ul_relaxed,
                     std::vector<double>& dl_rounded,
                     std::vector<double>& ul_rounded,
                     std::vector<int>& unassigned_users,
                     std::vector<int>& unassigned_sensors);

}  // namespace iotmarket
