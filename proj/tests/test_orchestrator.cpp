#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "iotmarket/evaluation.hpp"
#include "iotmarket/orchestrator.hpp"

using namespace iotmarket;

namespace {

Scenario degenerate_scenario() {
  ScenarioConfig cfg;
  cfg.num_inps = 1;
  cfg.bs_per_inp = 1;
  cfg.sensors_per_bs = 1;
  cfg.num_isps = 1;
  cfg.users_per_isp = 1;
  cfg.dl_subcarriers = cfg.ul_subcarriers = 1;
  cfg.dl_codebooks = cfg.ul_codebooks = 1;
  cfg.dl_degree = cfg.ul_degree = 1;
  return generate_scenario(cfg, 2);
}

Scenario small_scenario() {
  ScenarioConfig cfg;
  cfg.num_inps = 1;
  cfg.bs_per_inp = 1;
  cfg.sensors_per_bs = 1;
  cfg.num_isps = 1;
  cfg.users_per_isp = 2;
  cfg.dl_subcarriers = cfg.ul_subcarriers = 2;
  cfg.dl_codebooks = cfg.ul_codebooks = 2;
  cfg.dl_degree = cfg.ul_degree = 1;
  return generate_scenario(cfg, 3);
}

void check_monotone(const std::vector<double>& trace) {
  for (size_t k = 1; k < trace.size(); ++k)
    CHECK(trace[k] >= trace[k - 1] -
                          1e-9 * std::max(1.0, std::abs(trace[k - 1])));
}

// Exhaustive search over the degenerate instance: binary indicators and
// data share, 50-point power grids on the active links, and every vertex
// of the price box. Only feasible combinations count.
double brute_force_best(const Scenario& s) {
  const std::vector<double> ub = price_upper_bounds(s);
  REQUIRE(ub.size() == 6);
  const RevenueWeights w = RevenueWeights::from_scenario(s);
  const double p_cap = s.economics.power_cap[0];
  const double b_cap = s.economics.battery_cap[0];

  double best = -std::numeric_limits<double>::infinity();
  Allocation a = Allocation::zeros(s);
  for (int rho_dl = 0; rho_dl <= 1; ++rho_dl)
    for (int rho_ul = 0; rho_ul <= 1; ++rho_ul)
      for (int sel = 0; sel <= 1; ++sel)
        for (int ip = 0; ip < (rho_dl ? 50 : 1); ++ip)
          for (int iq = 0; iq < (rho_ul ? 50 : 1); ++iq)
            for (int vtx = 0; vtx < 64; ++vtx) {
              a.dl_assign[0] = rho_dl;
              a.ul_assign[0] = rho_ul;
              a.alpha[0] = sel;
              a.dl_power[0] = rho_dl ? p_cap * (ip + 1) / 50.0 : 0.0;
              a.ul_power[0] = rho_ul ? b_cap * (iq + 1) / 50.0 : 0.0;
              std::vector<double> flat(6);
              for (int j = 0; j < 6; ++j)
                flat[j] = (vtx >> j) & 1 ? ub[j] : 0.0;
              a.prices = unflatten_prices(s, flat);
              if (!check_constraints(s, a).feasible) continue;
              best = std::max(best, weighted_sum(total_revenues(s, a), w));
            }
  REQUIRE(std::isfinite(best));
  return best;
}

}  // namespace

TEST_CASE("degenerate instance reaches the brute-force optimum") {
  const Scenario s = degenerate_scenario();
  const double best = brute_force_best(s);

  const RunReport rep = run_weight_one(s);
  CHECK(rep.converged);
  CHECK_FALSE(rep.infeasible);
  CHECK(rep.iterations <= 5);
  check_monotone(rep.trace);
  const double got = rep.trace.back();
  CHECK(std::abs(got - best) <= 0.05 * std::abs(best));
}

TEST_CASE("zero price cap kills every internal transfer") {
  ScenarioConfig cfg;
  Scenario s = generate_scenario(cfg, 1);
  s.economics.price_cap = 0.0;

  const RunReport rep = run_weight_one(s);
  CHECK_FALSE(rep.infeasible);
  for (double price : flatten_prices(s, rep.final_alloc.prices))
    CHECK(price == 0.0);
  const PlayerRevenues& r = rep.revenues;
  for (const InpBreakdown& t : r.inp_terms) {
    CHECK(t.power_income == 0.0);
    CHECK(t.bw_income == 0.0);
  }
  for (const SensorBreakdown& t : r.sensor_terms) {
    CHECK(t.data_income == 0.0);
    CHECK(t.ul_rate_income == 0.0);
    CHECK(t.bw_cost == 0.0);
  }
  for (const IspBreakdown& t : r.isp_terms) {
    CHECK(t.rate_income == 0.0);
    CHECK(t.data_income == 0.0);
    CHECK(t.power_cost == 0.0);
    CHECK(t.data_cost == 0.0);
  }
  for (const UserBreakdown& t : r.user_terms) {
    CHECK(t.rate_cost == 0.0);
    CHECK(t.reservation_cost == 0.0);
  }
  // With the transfers gone the objective settles after the first pass.
  for (size_t k = 1; k < rep.trace.size(); ++k)
    CHECK(rep.trace[k] ==
          doctest::Approx(rep.trace[1]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("identical inputs give identical reports") {
  const Scenario s = degenerate_scenario();
  const RunReport a = run_weight_one(s);
  const RunReport b = run_weight_one(s);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t k = 0; k < a.trace.size(); ++k) CHECK(a.trace[k] == b.trace[k]);
  const std::vector<double> pa = flatten_prices(s, a.final_alloc.prices);
  const std::vector<double> pb = flatten_prices(s, b.final_alloc.prices);
  for (size_t k = 0; k < pa.size(); ++k) CHECK(pa[k] == pb[k]);
}

TEST_CASE("stubbed block solvers") {
  const Scenario s = degenerate_scenario();
  const Allocation start = initial_allocation(s);
  ProblemBinding pb;
  pb.scenario = &s;
  pb.form.weights = RevenueWeights::from_scenario(s);
  RunOptions opts;

  SUBCASE("identity solvers are a fixed point") {
    const BlockSolver keep = [](const Scenario&, const LinkContext&,
                                const Allocation& a,
                                const ScalarizedObjective&,
                                const InnerOptions&) { return a; };
    pb.price_solver = pb.alpha_solver = pb.power_solver = pb.codebook_solver =
        keep;
    const RunReport rep = alternating_loop(pb, start, opts);
    CHECK(rep.converged);
    CHECK(rep.iterations == 2);
    for (double v : rep.trace) CHECK(v == rep.trace[0]);
  }

  SUBCASE("a decreasing proposal is rejected, not applied") {
    pb.alpha_solver = [](const Scenario&, const LinkContext&,
                         const Allocation& a, const ScalarizedObjective&,
                         const InnerOptions&) {
      Allocation worse = a;
      std::fill(worse.alpha.begin(), worse.alpha.end(), 0.0);
      return worse;
    };
    const RunReport rep = alternating_loop(pb, start, opts);
    check_monotone(rep.trace);
    bool saw_rejection = false;
    for (const std::string& w : rep.warnings)
      saw_rejection = saw_rejection ||
                      w.find("alpha update rejected") != std::string::npos;
    CHECK(saw_rejection);
    REQUIRE(rep.final_alloc.alpha.size() == start.alpha.size());
    for (size_t k = 0; k < start.alpha.size(); ++k)
      CHECK(rep.final_alloc.alpha[k] == start.alpha[k]);
  }

  SUBCASE("early stop cuts the loop without claiming convergence") {
    std::vector<int> seen;
    pb.early_stop = [&seen](const Allocation&, int k) {
      seen.push_back(k);
      return k >= 1;
    };
    const RunReport rep = alternating_loop(pb, start, opts);
    CHECK(rep.iterations == 1);
    CHECK_FALSE(rep.converged);
    REQUIRE(seen.size() == 1);
    CHECK(seen[0] == 1);
  }

  SUBCASE("objective convergence beats the early stop") {
    const BlockSolver keep = [](const Scenario&, const LinkContext&,
                                const Allocation& a,
                                const ScalarizedObjective&,
                                const InnerOptions&) { return a; };
    pb.price_solver = pb.alpha_solver = pb.power_solver = pb.codebook_solver =
        keep;
    std::vector<int> seen;
    pb.early_stop = [&seen](const Allocation&, int k) {
      seen.push_back(k);
      return k >= 2;
    };
    const RunReport rep = alternating_loop(pb, start, opts);
    // Identity solvers converge at k = 2, where the tolerance check runs
    // before the cutoff; the cutoff is never consulted there.
    CHECK(rep.iterations == 2);
    CHECK(rep.converged);
    REQUIRE(seen.size() == 1);
    CHECK(seen[0] == 1);
  }
}

TEST_CASE("fairness run equalizes a symmetric toy") {
  testutil::UnitScenarioSpec spec;
  spec.num_inps = 2;
  spec.bs_per_inp = 1;
  spec.sensors_per_bs = 1;
  spec.num_isps = 2;
  spec.users_per_isp = 1;
  spec.subcarriers = 2;
  spec.codebooks = 2;
  spec.degree = 1;
  spec.power_cap = 4.0;
  spec.battery_cap = 1.0;
  Scenario s = testutil::unit_scenario(spec);
  s.economics.power_supplier_price = 0.1;
  s.economics.regulator_bw_price.assign(2, 0.1);
  s.economics.sensor_reservation.assign(2, 0.5);
  s.economics.user_reservation.assign(2, 10.0);

  const RunReport rep = run_max_min(s);
  CHECK_FALSE(rep.infeasible);
  check_monotone(rep.trace);
  const PlayerRevenues& r = rep.revenues;
  const double mx = std::max({std::abs(r.isp_total), std::abs(r.inp_total),
                              std::abs(r.sensor_total)});
  CHECK(std::abs(r.isp_total - r.inp_total) <= 0.1 * mx);
  CHECK(std::abs(r.inp_total - r.sensor_total) <= 0.1 * mx);

  // The report objective is t plus the user total, so t must sit on the
  // smallest class at an optimum of the epigraph form.
  const double t = rep.trace.back() - r.user_total;
  const double mn = std::min({r.isp_total, r.inp_total, r.sensor_total});
  CHECK(std::abs(mn - t) <= 1e-6 * std::max(1.0, std::abs(t)));
}

TEST_CASE("fairness beats the weighted sum on the default scenario") {
  const Scenario s = generate_scenario(default_scenario_config(), 1);
  const RunReport mm = run_max_min(s);
  const RunReport w1 = run_weight_one(s);
  REQUIRE_FALSE(mm.infeasible);
  REQUIRE_FALSE(w1.infeasible);
  const double jain_mm = jain_index(mm.revenues.isp_total,
                                    mm.revenues.inp_total,
                                    mm.revenues.sensor_total);
  const double jain_w1 = jain_index(w1.revenues.isp_total,
                                    w1.revenues.inp_total,
                                    w1.revenues.sensor_total);
  CHECK(jain_mm >= jain_w1);
}

TEST_CASE("conventional with floors disabled goes to the selfish vertices") {
  const Scenario s = small_scenario();
  RunOptions opts;
  opts.approach = Approach::conventional;
  opts.minima.isp_total = ConventionalMinima::kNone;
  opts.minima.user_total = ConventionalMinima::kNone;
  opts.minima.sensor_total = ConventionalMinima::kNone;
  opts.minima.inp_total = ConventionalMinima::kNone;
  opts.minima.per_inp = ConventionalMinima::kNone;
  opts.minima.per_isp = ConventionalMinima::kNone;

  const RunReport rep = run_conventional(s, opts);
  CHECK_FALSE(rep.infeasible);
  check_monotone(rep.trace);
  for (const std::string& w : rep.warnings)
    CHECK(w.find("calibrated") == std::string::npos);

  // Each owner prices its own income families at the cap; the one family
  // that is a pure cost to its owner (the ISP buying sensor data) lands on
  // zero.
  const PriceVector& p = rep.final_alloc.prices;
  const Scenario& cs = s;
  const std::vector<double> ub = price_upper_bounds(cs);
  const std::vector<double> flat = flatten_prices(cs, p);
  const Topology& t = cs.topology;
  const int B = t.total_bs(), I = t.num_inps, S = t.total_sensors();
  const int V = t.num_isps, U = t.num_users();
  int k = 0;
  for (int j = 0; j < B; ++j, ++k) CHECK(flat[k] == ub[k]);          // power
  for (int j = 0; j < I; ++j, ++k) CHECK(flat[k] == ub[k]);          // bw
  for (int j = 0; j < V * S; ++j, ++k) CHECK(flat[k] == 0.0);        // data
  for (int j = 0; j < S; ++j, ++k) CHECK(flat[k] == ub[k]);          // ul
  for (int j = 0; j < V; ++j, ++k) CHECK(flat[k] == ub[k]);          // dl
  for (int j = 0; j < U; ++j, ++k) CHECK(flat[k] == ub[k]);          // reserv
  CHECK(k == static_cast<int>(flat.size()));
}

TEST_CASE("conventional names the player behind an impossible floor") {
  const Scenario s = small_scenario();
  RunOptions opts;
  opts.approach = Approach::conventional;
  opts.minima.isp_total = ConventionalMinima::kNone;
  opts.minima.user_total = ConventionalMinima::kNone;
  opts.minima.sensor_total = ConventionalMinima::kNone;
  opts.minima.inp_total = 1e12;
  opts.minima.per_inp = ConventionalMinima::kNone;
  opts.minima.per_isp = ConventionalMinima::kNone;

  const RunReport rep = run_conventional(s, opts);
  CHECK(rep.infeasible);
  CHECK(rep.message.find("ISP 0") != std::string::npos);
  CHECK(rep.message.find("inp total") != std::string::npos);
}

TEST_CASE("conventional calibrates unset floors from a weighted-sum run") {
  const Scenario s = small_scenario();
  RunOptions opts;
  opts.approach = Approach::conventional;
  const RunReport rep = run_conventional(s, opts);
  CHECK_FALSE(rep.infeasible);
  check_monotone(rep.trace);
  bool saw_note = false;
  for (const std::string& w : rep.warnings)
    saw_note =
        saw_note || w.find("minima calibrated") != std::string::npos;
  CHECK(saw_note);
}
