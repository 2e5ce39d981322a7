#pragma once

#include <vector>

#include "iotmarket/link.hpp"

namespace iotmarket {

// Named income/cost components per player kind. Each revenue equals its
// incomes minus its costs; tests recompute the revenues from these terms.

struct InpBreakdown {
  double power_income = 0;  // selling BS transmit power to ISPs
  double bw_income = 0;     // selling DL/UL subcarrier access
  double power_cost = 0;    // buying the transmitted power externally
  double bw_cost = 0;       // licensing the band, allocation-independent
};

struct SensorBreakdown {
  double data_income = 0;      // datasets sold, at most once per ISP
  double ul_rate_income = 0;   // uplink delivery paid per bps by ISPs
  double reservation_cost = 0; // charged once if any user selects the sensor
  double power_cost = 0;       // battery energy bought externally
  double bw_cost = 0;          // uplink subcarrier access bought from the InP
};

struct IspBreakdown {
  double rate_income = 0;     // downlink rate sold to own users
  double data_income = 0;     // processed data sold to own users
  double power_cost = 0;      // BS power bought from InPs for own users
  double bw_cost = 0;         // DL subcarrier access for own users
  double data_cost = 0;       // raw datasets bought from sensors
  double ul_rate_cost = 0;    // uplink delivery paid to sensors
};

struct UserBreakdown {
  double data_value = 0;       // external reward for the processed service
  double rate_cost = 0;        // downlink rate bought from the ISP
  double reservation_cost = 0; // processed-data charge paid to the ISP
};

struct PlayerRevenues {
  std::vector<double> inp, sensor, isp, user;  // per-entity revenues
  double inp_total = 0, sensor_total = 0, isp_total = 0, user_total = 0;
  std::vector<InpBreakdown> inp_terms;
  std::vector<SensorBreakdown> sensor_terms;
  std::vector<IspBreakdown> isp_terms;
  std::vector<UserBreakdown> user_terms;

  double sum_totals() const {
    return inp_total + sensor_total + isp_total + user_total;
  }
};

/// Service quality of user u: sensing_quality_gain * ln(1 + selected/total
/// sensors). 0 when nothing is selected, strictly increasing in each share.
double service_quality(const Scenario& s, const Allocation& a, int u);

double inp_revenue(const Scenario& s, const Allocation& a, int i);
double sensor_revenue(const Scenario& s, const Allocation& a, int s_idx);
double isp_revenue(const Scenario& s, const Allocation& a, int v);
double user_revenue(const Scenario& s, const Allocation& a, int u);

/// All per-player revenues, totals, and component breakdowns in one pass.
/// Every price-denominated term appears once as an income and once as a cost
/// across players, so the sum of the four totals depends on prices only
/// through the external reward and cost constants.
PlayerRevenues total_revenues(const Scenario& s, const Allocation& a);
PlayerRevenues total_revenues(const Scenario& s, const LinkContext& ctx,
                              const Allocation& a, const RateTable& rates);

}  // namespace iotmarket
