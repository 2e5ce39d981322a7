#include "iotmarket/link.hpp"

#include <cmath>
#include <stdexcept>

namespace iotmarket {

PriceVector PriceVector::zeros(const Scenario& s) {
  const Topology& t = s.topology;
  PriceVector p;
  p.bs_power.assign(t.total_bs(), 0.0);
  p.bandwidth.assign(t.num_inps, 0.0);
  p.sensor_data.assign(
      static_cast<size_t>(t.num_isps) * t.total_sensors(), 0.0);
  p.uplink_rate.assign(t.total_sensors(), 0.0);
  p.downlink_rate.assign(t.num_isps, 0.0);
  p.user_reserv.assign(t.num_users(), 0.0);
  return p;
}

AllocShape AllocShape::of(const Scenario& s) {
  const Topology& t = s.topology;
  AllocShape sh;
  sh.num_bs = t.total_bs();
  sh.num_users = t.num_users();
  sh.num_sensors = t.total_sensors();
  sh.dl_cb.resize(sh.num_bs);
  sh.dl_base.resize(sh.num_bs);
  int off = 0;
  for (int b = 0; b < sh.num_bs; ++b) {
    sh.dl_cb[b] = t.dl_codebooks[t.inp_of_bs[b]];
    sh.dl_base[b] = off;
    off += sh.num_users * sh.dl_cb[b];
  }
  sh.dl_total = off;
  sh.ul_cb.resize(sh.num_sensors);
  sh.ul_base.resize(sh.num_sensors);
  off = 0;
  for (int sidx = 0; sidx < sh.num_sensors; ++sidx) {
    sh.ul_cb[sidx] = t.ul_codebooks[t.inp_of_bs[t.bs_of_sensor[sidx]]];
    sh.ul_base[sidx] = off;
    off += sh.ul_cb[sidx];
  }
  sh.ul_total = off;
  return sh;
}

Allocation Allocation::zeros(const Scenario& s) {
  AllocShape sh = AllocShape::of(s);
  Allocation a;
  a.dl_assign.assign(sh.dl_total, 0.0);
  a.ul_assign.assign(sh.ul_total, 0.0);
  a.dl_power.assign(sh.dl_total, 0.0);
  a.ul_power.assign(sh.ul_total, 0.0);
  a.prices = PriceVector::zeros(s);
  a.alpha.assign(static_cast<size_t>(sh.num_sensors) * sh.num_users, 0.0);
  return a;
}

int price_vector_size(const Scenario& s) {
  const Topology& t = s.topology;
  return t.total_bs() + t.num_inps + t.num_isps * t.total_sensors() +
         t.total_sensors() + t.num_isps + t.num_users();
}

std::vector<double> flatten_prices(const Scenario& s, const PriceVector& p) {
  std::vector<double> x;
  x.reserve(price_vector_size(s));
  x.insert(x.end(), p.bs_power.begin(), p.bs_power.end());
  x.insert(x.end(), p.bandwidth.begin(), p.bandwidth.end());
  x.insert(x.end(), p.sensor_data.begin(), p.sensor_data.end());
  x.insert(x.end(), p.uplink_rate.begin(), p.uplink_rate.end());
  x.insert(x.end(), p.downlink_rate.begin(), p.downlink_rate.end());
  x.insert(x.end(), p.user_reserv.begin(), p.user_reserv.end());
  return x;
}

PriceVector unflatten_prices(const Scenario& s, const std::vector<double>& x) {
  PriceVector p = PriceVector::zeros(s);
  size_t k = 0;
  for (double& v : p.bs_power) v = x.at(k++);
  for (double& v : p.bandwidth) v = x.at(k++);
  for (double& v : p.sensor_data) v = x.at(k++);
  for (double& v : p.uplink_rate) v = x.at(k++);
  for (double& v : p.downlink_rate) v = x.at(k++);
  for (double& v : p.user_reserv) v = x.at(k++);
  if (k != x.size())
    throw std::invalid_argument("price vector length mismatch");
  return p;
}

std::vector<double> price_upper_bounds(const Scenario& s) {
  const Topology& t = s.topology;
  const EconomicConstants& e = s.economics;
  double scaled = e.price_scale * e.price_cap;
  double plain = e.price_cap;
  std::vector<double> ub;
  ub.reserve(price_vector_size(s));
  ub.insert(ub.end(), t.total_bs(), scaled);                        // power
  ub.insert(ub.end(), t.num_inps, plain);                           // bandwidth
  ub.insert(ub.end(), t.num_isps * t.total_sensors(), scaled);      // data
  ub.insert(ub.end(), t.total_sensors(), plain);                    // UL rate
  ub.insert(ub.end(), t.num_isps, plain);                           // DL rate
  ub.insert(ub.end(), t.num_users(), scaled);                       // reserv
  return ub;
}

LinkGains precompute_link_gains(const Scenario& s) {
  const Topology& t = s.topology;
  const int B = t.total_bs(), U = t.num_users(), S = t.total_sensors();
  LinkGains g;
  g.dl.assign(B, {});
  g.ul.assign(B, {});
  for (int b = 0; b < B; ++b) {
    int i = t.inp_of_bs[b];
    int local = b - t.bs_offset[i];
    const CodebookMap& dl = s.dl_codebooks[i];
    const CodebookMap& ul = s.ul_codebooks[i];
    g.dl[b].assign(U, std::vector<double>(dl.num_codebooks(), 0.0));
    for (int u = 0; u < U; ++u)
      for (int c = 0; c < dl.num_codebooks(); ++c) {
        double acc = 0.0;
        for (int n = 0; n < dl.num_subcarriers(); ++n)
          if (dl.uses[c][n])
            acc += dl.split[local][n][c] * s.channels.dl_gain[b][u][n];
        g.dl[b][u][c] = acc;
      }
    g.ul[b].assign(S, std::vector<double>(ul.num_codebooks(), 0.0));
    for (int sidx = 0; sidx < S; ++sidx)
      for (int c = 0; c < ul.num_codebooks(); ++c) {
        double acc = 0.0;
        for (int m = 0; m < ul.num_subcarriers(); ++m)
          if (ul.uses[c][m])
            acc += ul.split[local][m][c] * s.channels.ul_gain[b][sidx][m];
        g.ul[b][sidx][c] = acc;
      }
  }
  return g;
}

LinkContext LinkContext::build(const Scenario& s) {
  return LinkContext{AllocShape::of(s), precompute_link_gains(s)};
}

double rate(double sinr) {
  if (sinr < 0 || !std::isfinite(sinr))
    throw std::domain_error("rate: SINR must be finite and >= 0");
  return std::log2(1.0 + sinr);
}

RateTable compute_rates(const Scenario& s, const LinkContext& ctx,
                        const Allocation& a) {
  const Topology& t = s.topology;
  const AllocShape& sh = ctx.shape;
  RateTable r;
  r.sinr_dl.assign(sh.dl_total, 0.0);
  r.rate_dl.assign(sh.dl_total, 0.0);
  r.sinr_ul.assign(sh.ul_total, 0.0);
  r.rate_ul.assign(sh.ul_total, 0.0);

  // Downlink: interference couples through the per-(BS, codebook) transmit
  // mass of same-provider neighbours on the same codebook.
  for (int b = 0; b < sh.num_bs; ++b) {
    int i = t.inp_of_bs[b];
    for (int c = 0; c < sh.dl_cb[b]; ++c) {
      for (int u = 0; u < sh.num_users; ++u) {
        int idx = sh.dl(b, u, c);
        if (a.dl_assign[idx] == 0.0) continue;
        double interference = 0.0;
        for (int b2 = t.bs_offset[i]; b2 < t.bs_offset[i] + t.bs_per_inp[i];
             ++b2) {
          if (b2 == b) continue;
          double mass = 0.0;
          for (int u2 = 0; u2 < sh.num_users; ++u2) {
            int j = sh.dl(b2, u2, c);
            mass += a.dl_assign[j] * a.dl_power[j];
          }
          interference += ctx.gains.dl[b2][u][c] * mass;
        }
        double signal =
            a.dl_assign[idx] * a.dl_power[idx] * ctx.gains.dl[b][u][c];
        r.sinr_dl[idx] = signal / (interference + s.channels.noise_dl);
        r.rate_dl[idx] = std::log2(1.0 + r.sinr_dl[idx]);
      }
    }
  }

  // Uplink: interferers are same-provider sensors of other cells on the same
  // codebook, heard at the victim's serving BS.
  for (int sidx = 0; sidx < sh.num_sensors; ++sidx) {
    int b = t.bs_of_sensor[sidx];
    int i = t.inp_of_bs[b];
    for (int c = 0; c < sh.ul_cb[sidx]; ++c) {
      int idx = sh.ul(sidx, c);
      if (a.ul_assign[idx] == 0.0) continue;
      double interference = 0.0;
      for (int s2 = 0; s2 < sh.num_sensors; ++s2) {
        int b2 = t.bs_of_sensor[s2];
        if (b2 == b || t.inp_of_bs[b2] != i) continue;
        int j = sh.ul(s2, c);
        interference +=
            a.ul_assign[j] * a.ul_power[j] * ctx.gains.ul[b][s2][c];
      }
      double signal =
          a.ul_assign[idx] * a.ul_power[idx] * ctx.gains.ul[b][sidx][c];
      r.sinr_ul[idx] = signal / (interference + s.channels.noise_ul);
      r.rate_ul[idx] = std::log2(1.0 + r.sinr_ul[idx]);
    }
  }
  return r;
}

double downlink_sinr(const Scenario& s, const Allocation& a, int b, int u,
                     int c) {
  AllocShape sh = AllocShape::of(s);
  if (b < 0 || b >= sh.num_bs || u < 0 || u >= sh.num_users || c < 0 ||
      c >= sh.dl_cb[b])
    throw std::out_of_range("downlink_sinr: index out of range");
  LinkContext ctx = LinkContext::build(s);
  RateTable r = compute_rates(s, ctx, a);
  return r.sinr_dl[sh.dl(b, u, c)];
}

double uplink_sinr(const Scenario& s, const Allocation& a, int b, int s_idx,
                   int c) {
  AllocShape sh = AllocShape::of(s);
  if (s_idx < 0 || s_idx >= sh.num_sensors || c < 0 || c >= sh.ul_cb[s_idx])
    throw std::out_of_range("uplink_sinr: index out of range");
  if (b != s.topology.bs_of_sensor[s_idx])
    throw std::out_of_range("uplink_sinr: BS is not the sensor's serving BS");
  LinkContext ctx = LinkContext::build(s);
  RateTable r = compute_rates(s, ctx, a);
  return r.sinr_ul[sh.ul(s_idx, c)];
}

namespace {

double tol_for(double rhs) { return 1e-9 * std::max(1.0, std::abs(rhs)); }

void check_le(ConstraintReport& rep, const std::string& family,
              std::vector<int> index, double lhs, double rhs) {
  if (lhs > rhs + tol_for(rhs))
    rep.violations.push_back({family, std::move(index), lhs, rhs, rhs - lhs});
}

void check_ge(ConstraintReport& rep, const std::string& family,
              std::vector<int> index, double lhs, double rhs) {
  if (lhs < rhs - tol_for(rhs))
    rep.violations.push_back({family, std::move(index), lhs, rhs, lhs - rhs});
}

}  // namespace

ConstraintReport check_constraints(const Scenario& s, const Allocation& a) {
  const Topology& t = s.topology;
  LinkContext ctx = LinkContext::build(s);
  const AllocShape& sh = ctx.shape;
  if (static_cast<int>(a.dl_assign.size()) != sh.dl_total ||
      static_cast<int>(a.ul_assign.size()) != sh.ul_total ||
      static_cast<int>(a.dl_power.size()) != sh.dl_total ||
      static_cast<int>(a.ul_power.size()) != sh.ul_total ||
      a.alpha.size() != static_cast<size_t>(sh.num_sensors) * sh.num_users)
    throw std::invalid_argument("check_constraints: allocation shape mismatch");

  ConstraintReport rep;

  // Domains: indicators in [0,1] (binary unless relaxed), powers and alpha
  // within their boxes.
  auto domain_val = [&](const std::string& family, int idx, double v,
                        bool indicator) {
    bool bad;
    if (indicator)
      bad = v < -1e-12 || v > 1.0 + 1e-12 ||
            (!a.relaxed && std::min(std::abs(v), std::abs(v - 1.0)) > 1e-9);
    else
      bad = v < -1e-12 || !std::isfinite(v);
    if (bad) rep.violations.push_back({family, {idx}, v, 0.0, 0.0});
  };
  for (int k = 0; k < sh.dl_total; ++k) {
    domain_val("domain", k, a.dl_assign[k], true);
    domain_val("domain", k, a.dl_power[k], false);
  }
  for (int k = 0; k < sh.ul_total; ++k) {
    domain_val("domain", k, a.ul_assign[k], true);
    domain_val("domain", k, a.ul_power[k], false);
  }
  for (size_t k = 0; k < a.alpha.size(); ++k) {
    double v = a.alpha[k];
    if (v < -1e-12 || v > 1.0 + 1e-12)
      rep.violations.push_back({"domain", {static_cast<int>(k)}, v, 0.0, 0.0});
  }

  // (5)-(6): a user takes codebooks from at most one BS. Audited as the
  // pairwise form so it also covers relaxed allocations.
  for (int u = 0; u < sh.num_users; ++u)
    for (int b1 = 0; b1 < sh.num_bs; ++b1)
      for (int c1 = 0; c1 < sh.dl_cb[b1]; ++c1) {
        double v1 = a.dl_assign[sh.dl(b1, u, c1)];
        if (v1 == 0.0) continue;
        for (int b2 = b1 + 1; b2 < sh.num_bs; ++b2)
          for (int c2 = 0; c2 < sh.dl_cb[b2]; ++c2)
            check_le(rep, "association", {u, b1, c1, b2, c2},
                     v1 + a.dl_assign[sh.dl(b2, u, c2)], 1.0);
      }

  // (7)-(8): per-provider per-subcarrier reuse.
  for (int i = 0; i < t.num_inps; ++i) {
    const CodebookMap& dl = s.dl_codebooks[i];
    for (int n = 0; n < t.dl_subcarriers[i]; ++n) {
      double used = 0.0;
      for (int b = t.bs_offset[i]; b < t.bs_offset[i] + t.bs_per_inp[i]; ++b)
        for (int u = 0; u < sh.num_users; ++u)
          for (int c = 0; c < sh.dl_cb[b]; ++c)
            used += a.dl_assign[sh.dl(b, u, c)] * dl.uses[c][n];
      check_le(rep, "reuse_dl", {i, n}, used, t.reuse_limit);
    }
    const CodebookMap& ul = s.ul_codebooks[i];
    for (int m = 0; m < t.ul_subcarriers[i]; ++m) {
      double used = 0.0;
      for (int sidx = 0; sidx < sh.num_sensors; ++sidx) {
        if (t.inp_of_bs[t.bs_of_sensor[sidx]] != i) continue;
        for (int c = 0; c < sh.ul_cb[sidx]; ++c)
          used += a.ul_assign[sh.ul(sidx, c)] * ul.uses[c][m];
      }
      check_le(rep, "reuse_ul", {i, m}, used, t.reuse_limit);
    }
  }

  // (9)-(10): transmit power budgets.
  for (int b = 0; b < sh.num_bs; ++b) {
    double total = 0.0;
    for (int u = 0; u < sh.num_users; ++u)
      for (int c = 0; c < sh.dl_cb[b]; ++c) {
        int k = sh.dl(b, u, c);
        total += a.dl_assign[k] * a.dl_power[k];
      }
    check_le(rep, "bs_power", {b}, total, s.economics.power_cap[b]);
  }
  for (int sidx = 0; sidx < sh.num_sensors; ++sidx) {
    double total = 0.0;
    for (int c = 0; c < sh.ul_cb[sidx]; ++c) {
      int k = sh.ul(sidx, c);
      total += a.ul_assign[k] * a.ul_power[k];
    }
    check_le(rep, "battery", {sidx}, total, s.economics.battery_cap[sidx]);
  }

  // (11)-(12): QoS floors on summed rates.
  RateTable rt = compute_rates(s, ctx, a);
  for (int u = 0; u < sh.num_users; ++u) {
    double sum = 0.0;
    for (int b = 0; b < sh.num_bs; ++b)
      for (int c = 0; c < sh.dl_cb[b]; ++c) sum += rt.rate_dl[sh.dl(b, u, c)];
    check_ge(rep, "dl_rate", {u}, sum,
             s.economics.min_dl_rate[t.user_to_isp[u]]);
  }
  for (int sidx = 0; sidx < sh.num_sensors; ++sidx) {
    double sum = 0.0;
    for (int c = 0; c < sh.ul_cb[sidx]; ++c) sum += rt.rate_ul[sh.ul(sidx, c)];
    check_ge(rep, "ul_rate", {sidx}, sum, s.economics.min_ul_rate[sidx]);
  }

  rep.feasible = rep.violations.empty();
  return rep;
}

}  // namespace iotmarket
