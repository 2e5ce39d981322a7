#include "iotmarket/economics.hpp"

#include <cmath>

namespace iotmarket {

namespace {

// min{sum of alpha over ISP v's users for sensor s, 1}: a dataset is sold to
// each ISP at most once.
double dataset_share(const Scenario& s, const Allocation& a, int v,
                     int s_idx) {
  double sum = 0.0;
  int U = s.topology.num_users();
  for (int u : s.topology.users_of_isp[v]) sum += a.alpha[s_idx * U + u];
  return std::min(sum, 1.0);
}

// min{sum of alpha over all users, 1}: the reservation charge fires once.
double any_selection(const Scenario& s, const Allocation& a, int s_idx) {
  double sum = 0.0;
  int U = s.topology.num_users();
  for (int u = 0; u < U; ++u) sum += a.alpha[s_idx * U + u];
  return std::min(sum, 1.0);
}

double quality(const Scenario& s, const Allocation& a, int u) {
  int U = s.topology.num_users();
  int S = s.topology.total_sensors();
  double selected = 0.0;
  for (int s_idx = 0; s_idx < S; ++s_idx) selected += a.alpha[s_idx * U + u];
  return s.economics.sensing_quality_gain * std::log1p(selected / S);
}

// Sum over the codebook's subcarriers of rho * W_S, the Hz actually occupied.
double dl_band_units(const Scenario& s, const AllocShape& sh,
                     const Allocation& a, int b) {
  int i = s.topology.inp_of_bs[b];
  const CodebookMap& map = s.dl_codebooks[i];
  double units = 0.0;
  for (int u = 0; u < sh.num_users; ++u)
    for (int c = 0; c < sh.dl_cb[b]; ++c)
      units += a.dl_assign[sh.dl(b, u, c)] * map.degree(c);
  return units * s.economics.subcarrier_bandwidth;
}

double ul_band_units(const Scenario& s, const AllocShape& sh,
                     const Allocation& a, int s_idx) {
  int i = s.topology.inp_of_bs[s.topology.bs_of_sensor[s_idx]];
  const CodebookMap& map = s.ul_codebooks[i];
  double units = 0.0;
  for (int c = 0; c < sh.ul_cb[s_idx]; ++c)
    units += a.ul_assign[sh.ul(s_idx, c)] * map.degree(c);
  return units * s.economics.subcarrier_bandwidth;
}

double sold_power(const AllocShape& sh, const Allocation& a, int b) {
  double total = 0.0;
  for (int u = 0; u < sh.num_users; ++u)
    for (int c = 0; c < sh.dl_cb[b]; ++c) {
      int k = sh.dl(b, u, c);
      total += a.dl_assign[k] * a.dl_power[k];
    }
  return total;
}

double sensor_power(const AllocShape& sh, const Allocation& a, int s_idx) {
  double total = 0.0;
  for (int c = 0; c < sh.ul_cb[s_idx]; ++c) {
    int k = sh.ul(s_idx, c);
    total += a.ul_assign[k] * a.ul_power[k];
  }
  return total;
}

// Downlink rate of user u at BS b weighted by the codebook degree, as the
// rate-denominated money terms count it (each incident subcarrier bills).
double weighted_dl_rate(const Scenario& s, const AllocShape& sh,
                        const RateTable& rt, int b, int u) {
  int i = s.topology.inp_of_bs[b];
  const CodebookMap& map = s.dl_codebooks[i];
  double sum = 0.0;
  for (int c = 0; c < sh.dl_cb[b]; ++c)
    sum += map.degree(c) * rt.rate_dl[sh.dl(b, u, c)];
  return sum;
}

double sensor_sum_rate(const AllocShape& sh, const RateTable& rt, int s_idx) {
  double sum = 0.0;
  for (int c = 0; c < sh.ul_cb[s_idx]; ++c) sum += rt.rate_ul[sh.ul(s_idx, c)];
  return sum;
}

}  // namespace

double service_quality(const Scenario& s, const Allocation& a, int u) {
  return quality(s, a, u);
}

PlayerRevenues total_revenues(const Scenario& s, const LinkContext& ctx,
                              const Allocation& a, const RateTable& rates) {
  const Topology& t = s.topology;
  const EconomicConstants& e = s.economics;
  const AllocShape& sh = ctx.shape;
  const PriceVector& L = a.prices;
  const int I = t.num_inps, V = t.num_isps, S = t.total_sensors(),
            U = t.num_users();

  PlayerRevenues out;
  out.inp_terms.resize(I);
  out.sensor_terms.resize(S);
  out.isp_terms.resize(V);
  out.user_terms.resize(U);

  for (int i = 0; i < I; ++i) {
    InpBreakdown& x = out.inp_terms[i];
    for (int b = t.bs_offset[i]; b < t.bs_offset[i] + t.bs_per_inp[i]; ++b) {
      double sold = sold_power(sh, a, b);
      x.power_income += L.bs_power[b] * sold;
      x.power_cost += e.power_supplier_price * sold;
      x.bw_income += L.bandwidth[i] * dl_band_units(s, sh, a, b);
    }
    for (int s_idx = 0; s_idx < S; ++s_idx)
      if (t.inp_of_bs[t.bs_of_sensor[s_idx]] == i)
        x.bw_income += L.bandwidth[i] * ul_band_units(s, sh, a, s_idx);
    x.bw_cost = (e.dl_band[i] + e.ul_band[i]) * e.regulator_bw_price[i];
  }

  for (int s_idx = 0; s_idx < S; ++s_idx) {
    SensorBreakdown& x = out.sensor_terms[s_idx];
    int i = t.inp_of_bs[t.bs_of_sensor[s_idx]];
    double sum_rate = sensor_sum_rate(sh, rates, s_idx);
    for (int v = 0; v < V; ++v) {
      double share = dataset_share(s, a, v, s_idx);
      x.data_income += share * L.sensor_data[v * S + s_idx];
      x.ul_rate_income += share * sum_rate * L.uplink_rate[s_idx];
    }
    x.reservation_cost =
        any_selection(s, a, s_idx) * e.sensor_reservation[s_idx];
    x.power_cost = e.power_supplier_price * sensor_power(sh, a, s_idx);
    x.bw_cost = L.bandwidth[i] * ul_band_units(s, sh, a, s_idx);
  }

  std::vector<double> Q(U);
  for (int u = 0; u < U; ++u) Q[u] = quality(s, a, u);

  for (int v = 0; v < V; ++v) {
    IspBreakdown& x = out.isp_terms[v];
    for (int u : t.users_of_isp[v]) {
      for (int b = 0; b < sh.num_bs; ++b) {
        int i = t.inp_of_bs[b];
        x.rate_income += L.downlink_rate[v] * e.subcarrier_bandwidth *
                         weighted_dl_rate(s, sh, rates, b, u);
        for (int c = 0; c < sh.dl_cb[b]; ++c) {
          int k = sh.dl(b, u, c);
          double used = a.dl_assign[k];
          x.power_cost += used * a.dl_power[k] * L.bs_power[b];
          x.bw_cost += L.bandwidth[i] * e.subcarrier_bandwidth * used *
                       s.dl_codebooks[i].degree(c);
        }
      }
      x.data_income += Q[u] * L.user_reserv[u];
    }
    for (int s_idx = 0; s_idx < S; ++s_idx) {
      double share = dataset_share(s, a, v, s_idx);
      x.data_cost += share * L.sensor_data[v * S + s_idx];
      x.ul_rate_cost +=
          share * sensor_sum_rate(sh, rates, s_idx) * L.uplink_rate[s_idx];
    }
  }

  for (int u = 0; u < U; ++u) {
    UserBreakdown& x = out.user_terms[u];
    int v = t.user_to_isp[u];
    x.data_value = Q[u] * e.user_reservation[u];
    for (int b = 0; b < sh.num_bs; ++b)
      x.rate_cost += L.downlink_rate[v] * e.subcarrier_bandwidth *
                     weighted_dl_rate(s, sh, rates, b, u);
    x.reservation_cost = Q[u] * L.user_reserv[u];
  }

  out.inp.resize(I);
  for (int i = 0; i < I; ++i) {
    const InpBreakdown& x = out.inp_terms[i];
    out.inp[i] = x.power_income + x.bw_income - x.power_cost - x.bw_cost;
    out.inp_total += out.inp[i];
  }
  out.sensor.resize(S);
  for (int s_idx = 0; s_idx < S; ++s_idx) {
    const SensorBreakdown& x = out.sensor_terms[s_idx];
    out.sensor[s_idx] = x.data_income + x.ul_rate_income -
                        x.reservation_cost - x.power_cost - x.bw_cost;
    out.sensor_total += out.sensor[s_idx];
  }
  out.isp.resize(V);
  for (int v = 0; v < V; ++v) {
    const IspBreakdown& x = out.isp_terms[v];
    out.isp[v] = x.rate_income + x.data_income - x.power_cost - x.bw_cost -
                 x.data_cost - x.ul_rate_cost;
    out.isp_total += out.isp[v];
  }
  out.user.resize(U);
  for (int u = 0; u < U; ++u) {
    const UserBreakdown& x = out.user_terms[u];
    out.user[u] = x.data_value - x.rate_cost - x.reservation_cost;
    out.user_total += out.user[u];
  }
  return out;
}

PlayerRevenues total_revenues(const Scenario& s, const Allocation& a) {
  LinkContext ctx = LinkContext::build(s);
  return total_revenues(s, ctx, a, compute_rates(s, ctx, a));
}

double inp_revenue(const Scenario& s, const Allocation& a, int i) {
  return total_revenues(s, a).inp.at(i);
}

double sensor_revenue(const Scenario& s, const Allocation& a, int s_idx) {
  return total_revenues(s, a).sensor.at(s_idx);
}

double isp_revenue(const Scenario& s, const Allocation& a, int v) {
  return total_revenues(s, a).isp.at(v);
}

double user_revenue(const Scenario& s, const Allocation& a, int u) {
  return total_revenues(s, a).user.at(u);
}

}  // namespace iotmarket
