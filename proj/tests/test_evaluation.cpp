#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "iotmarket/evaluation.hpp"

using namespace iotmarket;
using testutil::Lcg;

TEST_CASE("jain index on pinned triples") {
  CHECK(jain_index(5, 5, 5) == doctest::Approx(1.0));
  CHECK(jain_index(1, 1, 0) == doctest::Approx(4.0 / 6.0));
  CHECK(jain_index(1, 0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(jain_index(0, 0, 0), std::invalid_argument);
}

TEST_CASE("jain index is scale and permutation invariant") {
  Lcg rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform(-5.0, 5.0);
    const double b = rng.uniform(-5.0, 5.0);
    const double c = rng.uniform(0.1, 5.0);  // keeps the triple off zero
    const double base = jain_index(a, b, c);
    const double kappa = rng.uniform(0.1, 10.0);
    CHECK(jain_index(kappa * a, kappa * b, kappa * c) ==
          doctest::Approx(base));
    CHECK(jain_index(c, a, b) == doctest::Approx(base));
    CHECK(jain_index(b, c, a) == doctest::Approx(base));
    CHECK(base <= 1.0 + 1e-12);
  }
}

TEST_CASE("complexity table spot cells") {
  Topology t = generate_scenario(default_scenario_config(), 1).topology;
  // Baseline: I = 2, B_i = 2, S = 12, U = 8, V = 2.
  CHECK(power_constraint_count(t) == 36);
  CHECK(share_constraint_count(t) == 12 * (2 * 2 + 8 + 2));

  CHECK(complexity_delta(Approach::weight_one, Block::price, t) == 0);
  CHECK(complexity_delta(Approach::max_min, Block::price, t) == 3);
  CHECK(complexity_delta(Approach::conventional, Block::price, t) ==
        2 + 2 + 9);

  for (Block b : {Block::codebook, Block::power}) {
    const long long base = complexity_delta(Approach::weight_one, b, t);
    CHECK(complexity_delta(Approach::max_min, b, t) == base + 3);
    CHECK(complexity_delta(Approach::conventional, b, t) == base + 2 + 2 + 9);
  }
  const long long share = share_constraint_count(t);
  CHECK(complexity_delta(Approach::weight_one, Block::alpha, t) == share);
  CHECK(complexity_delta(Approach::max_min, Block::alpha, t) == share + 2);
  CHECK(complexity_delta(Approach::conventional, Block::alpha, t) ==
        share + 2 + 7);
}

TEST_CASE("power formula matches the rows the builder emits") {
  Lcg rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    ScenarioConfig cfg;
    cfg.num_inps = 1 + rng.pick(2);
    cfg.bs_per_inp = 1 + rng.pick(2);
    cfg.sensors_per_bs = 1 + rng.pick(2);
    cfg.num_isps = 1 + rng.pick(2);
    cfg.users_per_isp = 1 + rng.pick(3);
    cfg.dl_subcarriers = cfg.ul_subcarriers = 2 + rng.pick(2);
    cfg.dl_degree = cfg.ul_degree = 1 + rng.pick(2);
    const int n = cfg.dl_subcarriers;
    const int max_cb = cfg.dl_degree == 1 ? n : n * (n - 1) / 2;
    cfg.dl_codebooks = cfg.ul_codebooks = 1 + rng.pick(max_cb);
    const Scenario s = generate_scenario(cfg, 100 + trial);
    const EmittedRowCounts rows = emitted_row_counts(s);
    CHECK(rows.power == power_constraint_count(s.topology));
  }
}

TEST_CASE("ipm iteration estimate") {
  CHECK(ipm_iteration_estimate(0) == 0.0);
  // log10(36 / 1e-6) with the default unit start and tenfold update.
  CHECK(ipm_iteration_estimate(36) ==
        doctest::Approx(std::log10(36.0 / 1e-6)));
  CHECK(ipm_iteration_estimate(100, 1.0, 1e-4, 10.0) ==
        doctest::Approx(6.0));
}

namespace {

Scenario tiny_scenario() {
  ScenarioConfig cfg;
  cfg.num_inps = 1;
  cfg.bs_per_inp = 1;
  cfg.sensors_per_bs = 1;
  cfg.num_isps = 1;
  cfg.users_per_isp = 1;
  cfg.dl_subcarriers = cfg.ul_subcarriers = 2;
  cfg.dl_codebooks = cfg.ul_codebooks = 2;
  cfg.dl_degree = cfg.ul_degree = 1;
  return generate_scenario(cfg, 5);
}

}  // namespace

TEST_CASE("single-point sweep equals a direct run") {
  const Scenario s = tiny_scenario();
  RunOptions opts;
  opts.approach = Approach::weight_one;
  const RunReport direct = run_approach(s, opts);

  const SweepResult swept =
      sweep_lmax(s, {s.economics.price_cap}, {Approach::weight_one}, opts);
  REQUIRE(swept.cells.size() == 1);
  const SweepCell& cell = swept.cells[0];
  CHECK_FALSE(cell.failed);
  CHECK(cell.phi_isp == direct.revenues.isp_total);
  CHECK(cell.phi_inp == direct.revenues.inp_total);
  CHECK(cell.phi_sens == direct.revenues.sensor_total);
  CHECK(cell.phi_user == direct.revenues.user_total);
  CHECK(cell.iterations == direct.iterations);
  CHECK(cell.converged == direct.converged);
}

TEST_CASE("sweep rejects bad grids and is deterministic") {
  const Scenario s = tiny_scenario();
  RunOptions opts;
  CHECK_THROWS_AS(sweep_lmax(s, {}, {Approach::weight_one}, opts),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_lmax(s, {0.5, 0.5}, {Approach::weight_one}, opts),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_lmax(s, {1.0, 0.5}, {Approach::weight_one}, opts),
                  std::invalid_argument);

  const std::vector<double> grid = {0.25, 1.0};
  const SweepResult a = sweep_lmax(s, grid, {Approach::weight_one}, opts);
  const SweepResult b = sweep_lmax(s, grid, {Approach::weight_one}, opts);
  REQUIRE(a.cells.size() == b.cells.size());
  for (size_t k = 0; k < a.cells.size(); ++k) {
    CHECK(a.cells[k].sum == b.cells[k].sum);
    CHECK(a.cells[k].jain == b.cells[k].jain);
    CHECK(a.cells[k].iterations == b.cells[k].iterations);
  }
}

TEST_CASE("sweep records a failing cell and continues") {
  Scenario s = tiny_scenario();
  // An unreachable downlink floor makes every run report infeasible.
  s.economics.min_dl_rate.assign(s.topology.num_isps, 1e9);
  RunOptions opts;
  const SweepResult r =
      sweep_lmax(s, {0.5, 1.0}, {Approach::weight_one}, opts);
  REQUIRE(r.cells.size() == 2);
  for (const SweepCell& cell : r.cells) {
    CHECK(cell.failed);
    CHECK_FALSE(cell.error.empty());
  }
}
