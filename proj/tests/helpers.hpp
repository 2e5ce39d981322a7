#pragma once

// Shared builders for unit tests: hand-constructed scenarios with known
// channel values, and deterministic pseudo-random allocations.

#include <cstdint>
#include <vector>

#include "iotmarket/allocation.hpp"
#include "iotmarket/link.hpp"
#include "iotmarket/scenario.hpp"

namespace testutil {

// Small deterministic generator, independent of the library's sampling.
struct Lcg {
  std::uint64_t state;
  explicit Lcg(std::uint64_t seed) : state(seed * 2862933555777941757ULL + 1) {}
  std::uint64_t next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state;
  }
  double uniform() {  // in [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int pick(int n) { return static_cast<int>(next() % n); }
};

struct UnitScenarioSpec {
  int num_inps = 1;
  int bs_per_inp = 1;
  int sensors_per_bs = 1;
  int num_isps = 1;
  int users_per_isp = 1;
  int subcarriers = 1;   // both directions
  int codebooks = 1;     // both directions
  int degree = 1;        // both directions
  int reuse_limit = 4;
  double gain = 1.0;     // every channel entry
  double noise = 1.0;
  double power_cap = 4.0;
  double battery_cap = 4.0;
  double min_dl_rate = 0.0;
  double min_ul_rate = 0.0;
  double price_cap = 1.0;
  double price_scale = 10.0;
};

// Fully manual scenario: all gains equal, all distances 1. Channel entries
// can be edited afterwards; re-run finalize/validate only if the topology
// changes.
inline iotmarket::Scenario unit_scenario(const UnitScenarioSpec& spec) {
  using namespace iotmarket;
  Scenario s;
  Topology& t = s.topology;
  t.num_inps = spec.num_inps;
  t.bs_per_inp.assign(spec.num_inps, spec.bs_per_inp);
  t.sensors_per_bs = spec.sensors_per_bs;
  t.num_isps = spec.num_isps;
  t.users_per_isp = spec.users_per_isp;
  t.user_to_isp.resize(spec.num_isps * spec.users_per_isp);
  for (size_t u = 0; u < t.user_to_isp.size(); ++u)
    t.user_to_isp[u] = static_cast<int>(u) / spec.users_per_isp;
  t.dl_subcarriers.assign(spec.num_inps, spec.subcarriers);
  t.ul_subcarriers.assign(spec.num_inps, spec.subcarriers);
  t.dl_codebooks.assign(spec.num_inps, spec.codebooks);
  t.ul_codebooks.assign(spec.num_inps, spec.codebooks);
  t.reuse_limit = spec.reuse_limit;
  t.finalize();

  for (int i = 0; i < spec.num_inps; ++i) {
    s.dl_codebooks.push_back(build_codebook_map(
        spec.subcarriers, spec.codebooks, spec.degree, spec.bs_per_inp));
    s.ul_codebooks.push_back(build_codebook_map(
        spec.subcarriers, spec.codebooks, spec.degree, spec.bs_per_inp));
  }

  const int B = t.total_bs(), U = t.num_users(), S = t.total_sensors();
  ChannelState& ch = s.channels;
  ch.noise_dl = ch.noise_ul = spec.noise;
  ch.path_loss_exp = -3.0;
  ch.reference_distance = 1.0;
  ch.user_distance.assign(B, std::vector<double>(U, 1.0));
  ch.sensor_distance.assign(B, std::vector<double>(S, 1.0));
  ch.dl_gain.assign(B, {});
  ch.ul_gain.assign(B, {});
  for (int b = 0; b < B; ++b) {
    ch.dl_gain[b].assign(U, std::vector<double>(spec.subcarriers, spec.gain));
    ch.ul_gain[b].assign(S, std::vector<double>(spec.subcarriers, spec.gain));
  }

  EconomicConstants& e = s.economics;
  e.power_supplier_price = 0.0;
  e.regulator_bw_price.assign(spec.num_inps, 0.0);
  e.sensor_reservation.assign(S, 0.0);
  e.user_reservation.assign(U, 0.0);
  e.sensing_quality_gain = 1.0;
  e.subcarrier_bandwidth = 1.0;
  e.dl_band.assign(spec.num_inps, spec.subcarriers * 1.0);
  e.ul_band.assign(spec.num_inps, spec.subcarriers * 1.0);
  e.price_scale = spec.price_scale;
  e.price_cap = spec.price_cap;
  e.power_cap.assign(B, spec.power_cap);
  e.battery_cap.assign(S, spec.battery_cap);
  e.min_dl_rate.assign(spec.num_isps, spec.min_dl_rate);
  e.min_ul_rate.assign(S, spec.min_ul_rate);
  e.weight_isp.assign(spec.num_isps, 1.0);
  e.weight_user.assign(U, 1.0);
  e.weight_inp.assign(spec.num_inps, 1.0);
  e.weight_sensor.assign(S, 1.0);
  return s;
}

// Unconstrained random allocation: useful for identities that hold for any
// decision state, feasible or not.
inline iotmarket::Allocation random_allocation(const iotmarket::Scenario& s,
                                               std::uint64_t seed,
                                               bool relaxed = true) {
  using namespace iotmarket;
  Lcg rng(seed);
  AllocShape sh = AllocShape::of(s);
  Allocation a = Allocation::zeros(s);
  a.relaxed = relaxed;
  for (int k = 0; k < sh.dl_total; ++k) {
    a.dl_assign[k] = relaxed ? rng.uniform() : (rng.uniform() < 0.3 ? 1.0 : 0.0);
    a.dl_power[k] = rng.uniform(0.0, 1.0);
  }
  for (int k = 0; k < sh.ul_total; ++k) {
    a.ul_assign[k] = relaxed ? rng.uniform() : (rng.uniform() < 0.3 ? 1.0 : 0.0);
    a.ul_power[k] = rng.uniform(0.0, 0.2);
  }
  for (double& x : a.alpha) x = rng.uniform();
  std::vector<double> ub = price_upper_bounds(s);
  std::vector<double> flat(ub.size());
  for (size_t k = 0; k < ub.size(); ++k) flat[k] = rng.uniform() * ub[k];
  a.prices = unflatten_prices(s, flat);
  return a;
}

}  // namespace testutil
