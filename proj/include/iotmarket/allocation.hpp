#pragma once

#include <vector>

#include "iotmarket/scenario.hpp"

namespace iotmarket {

/// The six price families a run optimizes. Entries are money rates against
/// the caps in EconomicConstants: the Watt-denominated and money-denominated
/// families are capped by price_scale * price_cap, the Hz/bps families by
/// price_cap alone.
struct PriceVector {
  std::vector<double> bs_power;       // per BS, per Watt
  std::vector<double> bandwidth;      // per provider, per Hz
  std::vector<double> sensor_data;    // [v * S + s], per dataset
  std::vector<double> uplink_rate;    // per sensor, per bps
  std::vector<double> downlink_rate;  // per ISP, per bps
  std::vector<double> user_reserv;    // per user, per processed dataset

  static PriceVector zeros(const Scenario& s);
};

/// Flat index maps for the per-link triples. Downlink entries are (BS, user,
/// codebook of the BS's provider); uplink entries are (sensor, codebook of
/// the sensor's provider), the serving BS being fixed by the topology.
struct AllocShape {
  int num_bs = 0, num_users = 0, num_sensors = 0;
  std::vector<int> dl_cb;    // codebook count of bs b's provider
  std::vector<int> ul_cb;    // codebook count of sensor s's provider
  std::vector<int> dl_base;  // flat offset of (b, 0, 0)
  std::vector<int> ul_base;  // flat offset of (s, 0)
  int dl_total = 0, ul_total = 0;

  int dl(int b, int u, int c) const { return dl_base[b] + u * dl_cb[b] + c; }
  int ul(int s, int c) const { return ul_base[s] + c; }

  static AllocShape of(const Scenario& s);
};

/// Full decision state. Assignment entries live in {0,1}, or [0,1] while the
/// relaxed flag is set (inside the codebook block). alpha[s * U + u] is the
/// data-selection share of sensor s for user u.
struct Allocation {
  std::vector<double> dl_assign;  // AllocShape::dl order
  std::vector<double> ul_assign;  // AllocShape::ul order
  std::vector<double> dl_power;   // Watts
  std::vector<double> ul_power;   // Watts
  PriceVector prices;
  std::vector<double> alpha;
  bool relaxed = false;

  static Allocation zeros(const Scenario& s);
};

/// Flat view of a PriceVector in family order (bs_power, bandwidth,
/// sensor_data, uplink_rate, downlink_rate, user_reserv), used by the price
/// block and the CSV writers.
int price_vector_size(const Scenario& s);
std::vector<double> flatten_prices(const Scenario& s, const PriceVector& p);
PriceVector unflatten_prices(const Scenario& s, const std::vector<double>& x);
/// Upper bound of each flat price entry (lower bounds are all 0).
std::vector<double> price_upper_bounds(const Scenario& s);

}  // namespace iotmarket
