#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "iotmarket/convex_kernel.hpp"

using namespace iotmarket;

namespace {

// Weighted revenue at an allocation, straight through the economics layer.
double revenue_at(const Scenario& s, const Allocation& a,
                  const RevenueWeights& w) {
  return weighted_sum(total_revenues(s, a), w);
}

// Two BSs of one provider, two users and two sensors, everything on shared
// codebooks so cross-BS interference is live in both directions.
Scenario two_bs_scenario() {
  testutil::UnitScenarioSpec spec;
  spec.bs_per_inp = 2;
  spec.users_per_isp = 2;
  spec.sensors_per_bs = 1;
  spec.subcarriers = 2;
  spec.codebooks = 2;
  spec.degree = 1;
  spec.noise = 0.5;
  return testutil::unit_scenario(spec);
}

Allocation interfering_allocation(const Scenario& s, std::uint64_t seed) {
  Allocation a = Allocation::zeros(s);
  const AllocShape sh = AllocShape::of(s);
  a.dl_assign[sh.dl(0, 0, 0)] = 1.0;
  a.dl_assign[sh.dl(1, 1, 0)] = 1.0;  // same codebook, other BS
  a.ul_assign[sh.ul(0, 0)] = 1.0;
  a.ul_assign[sh.ul(1, 0)] = 1.0;
  testutil::Lcg rng(seed);
  for (double& p : a.dl_power) p = 0.5 + rng.uniform();
  for (double& p : a.ul_power) p = 0.2 + 0.5 * rng.uniform();
  a.alpha.assign(a.alpha.size(), 1.0);
  return a;
}

// Central finite difference of f at x along coordinate i.
double central_diff(const std::function<double(const std::vector<double>&)>& f,
                    std::vector<double> x, int i, double eps) {
  x[i] += eps;
  double up = f(x);
  x[i] -= 2.0 * eps;
  double dn = f(x);
  return (up - dn) / (2.0 * eps);
}

double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (f(c) > f(d))
      b = d;
    else
      a = c;
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("downlink linearization is tangent with matching gradient") {
  Scenario s = two_bs_scenario();
  Allocation a = interfering_allocation(s, 7);
  const std::vector<double> anchor = a.dl_power;
  DCLinearization lin = dc_linearize_downlink(s, a, anchor);
  REQUIRE(lin.terms.size() == 2);  // one per active link
  const double kLn2 = std::log(2.0);
  for (const DCRateTerm& t : lin.terms) {
    CHECK(std::abs(t.surrogate(anchor) - t.true_rate(anchor)) <= 1e-12);
    // Analytic surrogate gradient vs central differences of the true rate.
    const double f0 = t.f_arg.eval(anchor);
    for (size_t i = 0; i < anchor.size(); ++i) {
      double sg = 0.0;
      for (const auto& [j, c] : t.f_arg.terms)
        if (j == static_cast<int>(i)) sg += c / (kLn2 * f0);
      for (const auto& [j, c] : t.g_grad)
        if (j == static_cast<int>(i)) sg -= c;
      double fd = central_diff(
          [&](const std::vector<double>& p) { return t.true_rate(p); }, anchor,
          static_cast<int>(i), 1e-6);
      CHECK(std::abs(sg - fd) <= 1e-5);
    }
  }
}

TEST_CASE("uplink linearization is tangent with matching gradient") {
  Scenario s = two_bs_scenario();
  Allocation a = interfering_allocation(s, 19);
  const std::vector<double> anchor = a.ul_power;
  DCLinearization lin = dc_linearize_uplink(s, a, anchor);
  REQUIRE(lin.terms.size() == 2);
  const double kLn2 = std::log(2.0);
  for (const DCRateTerm& t : lin.terms) {
    CHECK(std::abs(t.surrogate(anchor) - t.true_rate(anchor)) <= 1e-12);
    const double f0 = t.f_arg.eval(anchor);
    bool has_interferer = false;
    for (size_t i = 0; i < anchor.size(); ++i) {
      double sg = 0.0;
      for (const auto& [j, c] : t.f_arg.terms)
        if (j == static_cast<int>(i)) sg += c / (kLn2 * f0);
      for (const auto& [j, c] : t.g_grad)
        if (j == static_cast<int>(i)) {
          sg -= c;
          has_interferer = true;
        }
      double fd = central_diff(
          [&](const std::vector<double>& p) { return t.true_rate(p); }, anchor,
          static_cast<int>(i), 1e-6);
      CHECK(std::abs(sg - fd) <= 1e-5);
    }
    CHECK(has_interferer);  // the other BS's sensor must show up
  }
}

TEST_CASE("no interference makes the surrogate exact everywhere") {
  testutil::UnitScenarioSpec spec;  // one BS: no cross-BS interferers
  Scenario s = testutil::unit_scenario(spec);
  Allocation a = Allocation::zeros(s);
  const AllocShape sh = AllocShape::of(s);
  a.dl_assign[sh.dl(0, 0, 0)] = 1.0;
  a.dl_power[sh.dl(0, 0, 0)] = 1.3;
  DCLinearization lin = dc_linearize_downlink(s, a, a.dl_power);
  REQUIRE(lin.terms.size() == 1);
  testutil::Lcg rng(3);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> p(a.dl_power.size(), 0.0);
    p[sh.dl(0, 0, 0)] = 4.0 * rng.uniform();
    CHECK(std::abs(lin.terms[0].surrogate(p) - lin.terms[0].true_rate(p)) <=
          1e-12);
  }
}

TEST_CASE("price step lands on a vertex and matches brute-force enumeration") {
  testutil::UnitScenarioSpec uspec;
  Scenario s = testutil::unit_scenario(uspec);
  s.economics.weight_inp = {2.0};
  s.economics.weight_isp = {1.0};
  s.economics.weight_sensor = {3.0};
  s.economics.weight_user = {1.0};
  Allocation a = Allocation::zeros(s);
  const AllocShape sh = AllocShape::of(s);
  a.dl_assign[sh.dl(0, 0, 0)] = 1.0;
  a.ul_assign[sh.ul(0, 0)] = 1.0;
  a.dl_power[sh.dl(0, 0, 0)] = 1.0;
  a.ul_power[sh.ul(0, 0)] = 0.5;
  a.alpha = {1.0};

  PriceVector got = solve_price_step(s, a);
  std::vector<double> flat = flatten_prices(s, got);
  std::vector<double> ub = price_upper_bounds(s);
  const int P = price_vector_size(s);
  REQUIRE(P == 6);
  for (int j = 0; j < P; ++j)
    CHECK((flat[j] == 0.0 || flat[j] == ub[j]));

  RevenueWeights w = RevenueWeights::from_scenario(s);
  Allocation probe = a;
  probe.prices = got;
  const double got_value = revenue_at(s, probe, w);
  double best = -1e300;
  for (int mask = 0; mask < (1 << P); ++mask) {
    std::vector<double> v(P, 0.0);
    for (int j = 0; j < P; ++j)
      if (mask & (1 << j)) v[j] = ub[j];
    probe.prices = unflatten_prices(s, v);
    best = std::max(best, revenue_at(s, probe, w));
  }
  CHECK(got_value ==
        doctest::Approx(best).epsilon(1e-9).scale(std::abs(best) + 1.0));
}

TEST_CASE("reservation price coefficient follows the weight gap") {
  testutil::UnitScenarioSpec uspec;
  Scenario s = testutil::unit_scenario(uspec);
  Allocation a = Allocation::zeros(s);
  a.alpha = {1.0};  // positive service quality
  std::vector<double> ub = price_upper_bounds(s);

  // ISP weighted above the user: selling processed data is net positive.
  s.economics.weight_isp = {2.0};
  s.economics.weight_user = {1.0};
  PriceVector hi = solve_price_step(s, a);
  CHECK(hi.user_reserv[0] == ub[5]);

  // User weighted above the ISP: the charge hurts more than it earns.
  s.economics.weight_isp = {1.0};
  s.economics.weight_user = {2.0};
  PriceVector lo = solve_price_step(s, a);
  CHECK(lo.user_reserv[0] == 0.0);
}

TEST_CASE("alpha step with no upside stays at zero") {
  testutil::UnitScenarioSpec uspec;
  uspec.sensors_per_bs = 2;
  Scenario s = testutil::unit_scenario(uspec);
  s.economics.user_reservation = {0.0};
  s.economics.sensor_reservation = {0.5, 0.5};
  Allocation a = Allocation::zeros(s);
  a.alpha = {0.4, 0.6};  // anything positive only pays reservation cost
  AlphaStep step = solve_alpha_step(s, a);
  for (double v : step.alpha) CHECK(v <= 1e-5);
  CHECK(step.info.converged);
}

TEST_CASE("alpha step with free data saturates") {
  testutil::UnitScenarioSpec uspec;
  Scenario s = testutil::unit_scenario(uspec);
  s.economics.sensor_reservation = {0.0};
  s.economics.user_reservation = {5.0};
  Allocation a = Allocation::zeros(s);
  a.alpha = {0.2};
  AlphaStep step = solve_alpha_step(s, a);
  CHECK(step.alpha[0] >= 1.0 - 1e-5);
  CHECK(step.delta[0] == doctest::Approx(step.alpha[0]));
  CHECK(step.beta[0] == doctest::Approx(step.alpha[0]));
}

TEST_CASE("alpha step beats a 0.1 grid on two sensors") {
  testutil::UnitScenarioSpec uspec;
  uspec.sensors_per_bs = 2;
  Scenario s = testutil::unit_scenario(uspec);
  s.economics.user_reservation = {2.0};
  s.economics.sensor_reservation = {0.6, 0.3};
  s.economics.sensing_quality_gain = 1.5;
  Allocation a = Allocation::zeros(s);
  const AllocShape sh = AllocShape::of(s);
  a.ul_assign[sh.ul(0, 0)] = 1.0;
  a.ul_assign[sh.ul(1, 0)] = 1.0;
  a.ul_power[sh.ul(0, 0)] = 0.8;
  a.ul_power[sh.ul(1, 0)] = 0.8;
  a.prices.sensor_data = {0.4, 0.4};
  a.prices.uplink_rate = {0.2, 0.2};
  a.prices.user_reserv = {0.7};
  a.alpha = {0.5, 0.5};

  AlphaStep step = solve_alpha_step(s, a);
  REQUIRE(step.info.converged);
  Allocation out = a;
  out.alpha = step.alpha;
  RevenueWeights w = RevenueWeights::from_scenario(s);
  const double got = revenue_at(s, out, w);

  double grid_best = -1e300;
  Allocation probe = a;
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) {
      probe.alpha = {0.1 * i, 0.1 * j};
      grid_best = std::max(grid_best, revenue_at(s, probe, w));
    }
  CHECK(got >= grid_best - 1e-3);
  CHECK(got <= grid_best + 1e-3);
}

TEST_CASE("power step matches a golden-section oracle per direction") {
  testutil::UnitScenarioSpec uspec;
  uspec.noise = 1.0;
  Scenario s = testutil::unit_scenario(uspec);
  s.economics.power_supplier_price = 0.5;
  s.economics.weight_user = {0.0};
  s.economics.weight_sensor = {2.0};
  Allocation a = Allocation::zeros(s);
  const AllocShape sh = AllocShape::of(s);
  a.dl_assign[sh.dl(0, 0, 0)] = 1.0;
  a.ul_assign[sh.ul(0, 0)] = 1.0;
  a.dl_power[sh.dl(0, 0, 0)] = 0.5;
  a.ul_power[sh.ul(0, 0)] = 0.5;
  a.alpha = {1.0};
  a.prices.downlink_rate = {1.0};
  a.prices.uplink_rate = {1.0};
  a.prices.bs_power = {0.3};

  PowerAnchor anchor{a.dl_power, a.ul_power};
  PowerStep step = solve_power_step(s, a, anchor);
  REQUIRE(step.info.converged);
  const double p_dl = step.dl[sh.dl(0, 0, 0)];
  const double p_ul = step.ul[sh.ul(0, 0)];

  RevenueWeights w = RevenueWeights::from_scenario(s);
  auto value = [&](double dl, double ul) {
    Allocation probe = a;
    probe.dl_power[sh.dl(0, 0, 0)] = dl;
    probe.ul_power[sh.ul(0, 0)] = ul;
    return revenue_at(s, probe, w);
  };
  // One BS and one sensor: the two directions decouple exactly.
  double best_dl = golden_max([&](double p) { return value(p, p_ul); }, 0.0,
                              s.economics.power_cap[0]);
  double best_ul = golden_max([&](double p) { return value(p_dl, p); }, 0.0,
                              s.economics.battery_cap[0]);
  CHECK(std::abs(p_dl - best_dl) <= 1e-4);
  CHECK(std::abs(p_ul - best_ul) <= 1e-4);
  // First-order condition through the true objective.
  auto fd = [&](bool dl_dir) {
    const double eps = 1e-5;
    return dl_dir ? (value(p_dl + eps, p_ul) - value(p_dl - eps, p_ul)) /
                        (2 * eps)
                  : (value(p_dl, p_ul + eps) - value(p_dl, p_ul - eps)) /
                        (2 * eps);
  };
  CHECK(std::abs(fd(true)) <= 1e-6);
  CHECK(std::abs(fd(false)) <= 1e-6);
}

TEST_CASE("zero rate prices drive every power to zero") {
  testutil::UnitScenarioSpec uspec;
  Scenario s = testutil::unit_scenario(uspec);
  s.economics.power_supplier_price = 0.5;
  Allocation a = Allocation::zeros(s);
  const AllocShape sh = AllocShape::of(s);
  a.dl_assign[sh.dl(0, 0, 0)] = 1.0;
  a.ul_assign[sh.ul(0, 0)] = 1.0;
  a.dl_power[sh.dl(0, 0, 0)] = 2.0;
  a.ul_power[sh.ul(0, 0)] = 2.0;
  a.alpha = {1.0};
  // All prices zero: transmitting only burns supplier-priced energy.
  PowerAnchor anchor{a.dl_power, a.ul_power};
  PowerStep step = solve_power_step(s, a, anchor);
  CHECK(step.dl[sh.dl(0, 0, 0)] <= 1e-5);
  CHECK(step.ul[sh.ul(0, 0)] <= 1e-5);
}

TEST_CASE("power step never degrades the true objective") {
  ScenarioConfig cfg = default_scenario_config();
  cfg.min_dl_rate = 0.0;
  cfg.min_ul_rate = 0.0;
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    Scenario s = generate_scenario(cfg, seed);
    const AllocShape sh = AllocShape::of(s);
    Allocation a = Allocation::zeros(s);
    testutil::Lcg rng(seed * 31 + 1);
    // One link per user and sensor, power split within each cap.
    for (int u = 0; u < sh.num_users; ++u) {
      int b = static_cast<int>(rng.uniform() * sh.num_bs) % sh.num_bs;
      int c = static_cast<int>(rng.uniform() * sh.dl_cb[b]) % sh.dl_cb[b];
      a.dl_assign[sh.dl(b, u, c)] = 1.0;
    }
    for (int sn = 0; sn < sh.num_sensors; ++sn) {
      int c = static_cast<int>(rng.uniform() * sh.ul_cb[sn]) % sh.ul_cb[sn];
      a.ul_assign[sh.ul(sn, c)] = 1.0;
    }
    for (int b = 0; b < sh.num_bs; ++b)
      for (int u = 0; u < sh.num_users; ++u)
        for (int c = 0; c < sh.dl_cb[b]; ++c) {
          int k = sh.dl(b, u, c);
          if (a.dl_assign[k] > 0)
            a.dl_power[k] =
                0.4 * s.economics.power_cap[b] / (sh.num_users + 1);
        }
    for (int sn = 0; sn < sh.num_sensors; ++sn)
      for (int c = 0; c < sh.ul_cb[sn]; ++c) {
        int k = sh.ul(sn, c);
        if (a.ul_assign[k] > 0)
          a.ul_power[k] = 0.5 * s.economics.battery_cap[sn];
      }
    for (double& v : a.alpha) v = rng.uniform();
    a.prices = unflatten_prices(s, price_upper_bounds(s));
    for (double& v : a.prices.bs_power) v *= 0.5 * rng.uniform();
    for (double& v : a.prices.downlink_rate) v *= rng.uniform();
    for (double& v : a.prices.uplink_rate) v *= rng.uniform();

    RevenueWeights w = RevenueWeights::from_scenario(s);
    const double before = revenue_at(s, a, w);
    PowerAnchor anchor{a.dl_power, a.ul_power};
    PowerStep step = solve_power_step(s, a, anchor);
    Allocation out = a;
    out.dl_power = step.dl;
    out.ul_power = step.ul;
    const double after = revenue_at(s, out, w);
    CAPTURE(seed);
    CHECK(after >= before - 1e-9);
  }
}

TEST_CASE("power step emits one row per structural constraint") {
  ScenarioConfig cfg = default_scenario_config();
  Scenario s = generate_scenario(cfg, 5);
  const AllocShape sh = AllocShape::of(s);
  Allocation a = Allocation::zeros(s);
  a.dl_assign[sh.dl(0, 0, 0)] = 1.0;
  a.dl_power[sh.dl(0, 0, 0)] = 0.1;
  PowerAnchor anchor{a.dl_power, a.ul_power};
  PowerStep step = solve_power_step(s, a, anchor);
  const int B = sh.num_bs, S = sh.num_sensors, U = sh.num_users;
  CHECK(step.rows_emitted == B + 2 * S + U);
}

TEST_CASE("single beneficial indicator rounds to one") {
  testutil::UnitScenarioSpec uspec;
  Scenario s = testutil::unit_scenario(uspec);
  s.economics.weight_isp = {0.0};
  s.economics.weight_sensor = {0.0};
  s.economics.weight_user = {0.0};  // provider-only objective
  Allocation a = Allocation::zeros(s);
  a.prices.bandwidth = {1.0};
  CodebookStep step = solve_codebook_step(s, a);
  CHECK(step.dl_relaxed[0] >= 0.95);
  CHECK(step.dl_rounded[0] == 1.0);
  CHECK(step.ul_rounded[0] == 1.0);
  CHECK(step.unassigned_users.empty());
  CHECK(step.unassigned_sensors.empty());
}

TEST_CASE("disjoint equal codebooks tie to the lowest index") {
  testutil::UnitScenarioSpec uspec;
  uspec.subcarriers = 2;
  uspec.codebooks = 2;
  uspec.degree = 1;  // codebooks {0} and {1}: disjoint, identical gains
  Scenario s = testutil::unit_scenario(uspec);
  s.economics.weight_isp = {0.0};
  s.economics.weight_sensor = {0.0};
  s.economics.weight_user = {0.0};
  Allocation a = Allocation::zeros(s);
  a.prices.bandwidth = {1.0};
  CodebookStep step = solve_codebook_step(s, a);
  const AllocShape sh = AllocShape::of(s);
  CHECK(std::abs(step.dl_relaxed[sh.dl(0, 0, 0)] -
                 step.dl_relaxed[sh.dl(0, 0, 1)]) <= 1e-6);
  CHECK(step.dl_rounded[sh.dl(0, 0, 0)] == 1.0);
  CHECK(step.dl_rounded[sh.dl(0, 0, 1)] == 0.0);
  CHECK(step.ul_rounded[sh.ul(0, 0)] == 1.0);
}

TEST_CASE("rounding respects reuse limits on random instances") {
  ScenarioConfig cfg = default_scenario_config();
  cfg.reuse_limit = 2;  // tight enough to actually bind
  Scenario s = generate_scenario(cfg, 77);
  const AllocShape sh = AllocShape::of(s);
  const Topology& t = s.topology;
  testutil::Lcg rng(99);
  for (int inst = 0; inst < 20; ++inst) {
    std::vector<double> dl(sh.dl_total), ul(sh.ul_total);
    for (double& v : dl) v = rng.uniform();
    for (double& v : ul) v = rng.uniform();
    std::vector<double> dl_r, ul_r;
    std::vector<int> uu, us;
    round_codebooks(s, dl, ul, dl_r, ul_r, uu, us);
    // Direct usage count per provider and subcarrier.
    for (int i = 0; i < t.num_inps; ++i) {
      for (int n = 0; n < t.dl_subcarriers[i]; ++n) {
        int used = 0;
        for (int b = t.bs_offset[i]; b < t.bs_offset[i] + t.bs_per_inp[i]; ++b)
          for (int u = 0; u < sh.num_users; ++u)
            for (int c = 0; c < sh.dl_cb[b]; ++c)
              if (s.dl_codebooks[i].uses[c][n] &&
                  dl_r[sh.dl(b, u, c)] > 0.5)
                ++used;
        CHECK(used <= t.reuse_limit);
      }
      for (int mcar = 0; mcar < t.ul_subcarriers[i]; ++mcar) {
        int used = 0;
        for (int sn = 0; sn < sh.num_sensors; ++sn) {
          if (t.inp_of_bs[t.bs_of_sensor[sn]] != i) continue;
          for (int c = 0; c < sh.ul_cb[sn]; ++c)
            if (s.ul_codebooks[i].uses[c][mcar] && ul_r[sh.ul(sn, c)] > 0.5)
              ++used;
        }
        CHECK(used <= t.reuse_limit);
      }
    }
    // Every user and sensor is either assigned or reported.
    for (int u = 0; u < sh.num_users; ++u) {
      double tot = 0;
      for (int b = 0; b < sh.num_bs; ++b)
        for (int c = 0; c < sh.dl_cb[b]; ++c) tot += dl_r[sh.dl(b, u, c)];
      bool reported =
          std::find(uu.begin(), uu.end(), u) != uu.end();
      CHECK(((tot == 1.0) != reported));
    }
  }
}

TEST_CASE("codebook step emits the documented row inventory") {
  ScenarioConfig cfg = default_scenario_config();
  Scenario s = generate_scenario(cfg, 8);
  const AllocShape sh = AllocShape::of(s);
  const Topology& t = s.topology;
  Allocation a = Allocation::zeros(s);
  CodebookStep step = solve_codebook_step(s, a);
  int dl_opts = 0;
  for (int b = 0; b < sh.num_bs; ++b) dl_opts += sh.dl_cb[b];
  int expect = sh.num_users * dl_opts * (dl_opts - 1) / 2;
  for (int sn = 0; sn < sh.num_sensors; ++sn)
    expect += sh.ul_cb[sn] * (sh.ul_cb[sn] - 1) / 2;
  for (int i = 0; i < t.num_inps; ++i)
    expect += t.dl_subcarriers[i] + t.ul_subcarriers[i];
  expect += sh.num_bs + sh.num_sensors;       // caps
  expect += sh.num_users + sh.num_sensors;    // rate floors
  CHECK(step.rows_emitted == expect);
}
