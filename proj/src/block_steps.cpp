#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <utility>

#include "kernel_detail.hpp"

namespace iotmarket {

RevenueWeights RevenueWeights::zeros(const Scenario& s) {
  RevenueWeights w;
  w.inp.assign(s.topology.num_inps, 0.0);
  w.isp.assign(s.topology.num_isps, 0.0);
  w.sensor.assign(s.topology.total_sensors(), 0.0);
  w.user.assign(s.topology.num_users(), 0.0);
  return w;
}

RevenueWeights RevenueWeights::from_scenario(const Scenario& s) {
  RevenueWeights w;
  w.inp = s.economics.weight_inp;
  w.isp = s.economics.weight_isp;
  w.sensor = s.economics.weight_sensor;
  w.user = s.economics.weight_user;
  return w;
}

RevenueWeights RevenueWeights::one_inp(const Scenario& s, int i) {
  RevenueWeights w = zeros(s);
  w.inp.at(i) = 1.0;
  return w;
}

RevenueWeights RevenueWeights::one_isp(const Scenario& s, int v) {
  RevenueWeights w = zeros(s);
  w.isp.at(v) = 1.0;
  return w;
}

RevenueWeights RevenueWeights::all_inps(const Scenario& s) {
  RevenueWeights w = zeros(s);
  w.inp.assign(w.inp.size(), 1.0);
  return w;
}

RevenueWeights RevenueWeights::all_isps(const Scenario& s) {
  RevenueWeights w = zeros(s);
  w.isp.assign(w.isp.size(), 1.0);
  return w;
}

RevenueWeights RevenueWeights::all_sensors(const Scenario& s) {
  RevenueWeights w = zeros(s);
  w.sensor.assign(w.sensor.size(), 1.0);
  return w;
}

RevenueWeights RevenueWeights::all_users(const Scenario& s) {
  RevenueWeights w = zeros(s);
  w.user.assign(w.user.size(), 1.0);
  return w;
}

double weighted_sum(const PlayerRevenues& r, const RevenueWeights& w) {
  double v = 0.0;
  for (size_t i = 0; i < r.inp.size(); ++i) v += w.inp[i] * r.inp[i];
  for (size_t k = 0; k < r.isp.size(); ++k) v += w.isp[k] * r.isp[k];
  for (size_t k = 0; k < r.sensor.size(); ++k) v += w.sensor[k] * r.sensor[k];
  for (size_t k = 0; k < r.user.size(); ++k) v += w.user[k] * r.user[k];
  return v;
}

double true_objective(const Scenario& s, const LinkContext& ctx,
                      const Allocation& a, const ScalarizedObjective& form) {
  PlayerRevenues r = total_revenues(s, ctx, a, compute_rates(s, ctx, a));
  double v = weighted_sum(r, form.weights);
  if (form.with_t) {
    double t = std::numeric_limits<double>::infinity();
    for (const RevenueRow& row : form.rows)
      if (row.vs_t) t = std::min(t, weighted_sum(r, row.select));
    if (std::isfinite(t)) v += t;
  }
  return v;
}

namespace {

using detail::RateVar;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Per-build cache: rates, data-selection aggregates, and the coefficient
// formulas every block shares. All values are taken at the block's input
// allocation, which is also the linearization anchor.
struct BlockContext {
  const Scenario& s;
  const LinkContext& ctx;
  const Allocation& a;
  RateTable rates;
  std::vector<double> share;     // [v * S + s], min(sum alpha over K_v, 1)
  std::vector<double> any_sel;   // per sensor, min(sum alpha over users, 1)
  std::vector<double> sum_rate;  // per sensor, over its codebooks

  BlockContext(const Scenario& sc, const LinkContext& lc, const Allocation& al)
      : s(sc), ctx(lc), a(al), rates(compute_rates(sc, lc, al)) {
    const Topology& t = s.topology;
    const int S = t.total_sensors(), U = t.num_users(), V = t.num_isps;
    share.assign(static_cast<size_t>(V) * S, 0.0);
    any_sel.assign(S, 0.0);
    sum_rate.assign(S, 0.0);
    for (int sn = 0; sn < S; ++sn) {
      double all = 0.0;
      for (int v = 0; v < V; ++v) {
        double part = 0.0;
        for (int u : t.users_of_isp[v]) part += a.alpha[sn * U + u];
        share[v * S + sn] = std::min(part, 1.0);
        all += part;
      }
      any_sel[sn] = std::min(all, 1.0);
      for (int c = 0; c < ctx.shape.ul_cb[sn]; ++c)
        sum_rate[sn] += rates.rate_ul[ctx.shape.ul(sn, c)];
    }
  }

  double deg_dl(int b, int c) const {
    return s.dl_codebooks[s.topology.inp_of_bs[b]].degree(c);
  }
  double deg_ul(int sn, int c) const {
    return s.ul_codebooks[s.topology.inp_of_bs[s.topology.bs_of_sensor[sn]]]
        .degree(c);
  }

  // Net weight multiplying one DL link's rate: the ISP sells what the user
  // buys, both per Hz of the codebook's subcarriers.
  double dl_rate_weight(const RevenueWeights& lam, int b, int u, int c) const {
    int v = s.topology.user_to_isp[u];
    return (lam.isp[v] - lam.user[u]) * a.prices.downlink_rate[v] *
           s.economics.subcarrier_bandwidth * deg_dl(b, c);
  }

  // Net weight multiplying one UL link's rate: every ISP with a positive
  // selection share pays the sensor for delivery.
  double ul_rate_weight(const RevenueWeights& lam, int sn) const {
    const int S = s.topology.total_sensors();
    double w = 0.0;
    for (int v = 0; v < s.topology.num_isps; ++v)
      w += share[v * S + sn] * (lam.sensor[sn] - lam.isp[v]);
    return w * a.prices.uplink_rate[sn];
  }

  // Coefficient of the rho*p product of one DL link: the InP's margin over
  // the external supplier minus the buying ISP's expense.
  double dl_energy_coef(const RevenueWeights& lam, int b, int u) const {
    int i = s.topology.inp_of_bs[b];
    int v = s.topology.user_to_isp[u];
    return lam.inp[i] *
               (a.prices.bs_power[b] - s.economics.power_supplier_price) -
           lam.isp[v] * a.prices.bs_power[b];
  }

  // Sensors buy battery energy externally; nobody resells it.
  double ul_energy_coef(const RevenueWeights& lam, int sn) const {
    return -lam.sensor[sn] * s.economics.power_supplier_price;
  }

  double dl_band_coef(const RevenueWeights& lam, int b, int u, int c) const {
    int i = s.topology.inp_of_bs[b];
    int v = s.topology.user_to_isp[u];
    return (lam.inp[i] - lam.isp[v]) * a.prices.bandwidth[i] * deg_dl(b, c) *
           s.economics.subcarrier_bandwidth;
  }

  double ul_band_coef(const RevenueWeights& lam, int sn, int c) const {
    int i = s.topology.inp_of_bs[s.topology.bs_of_sensor[sn]];
    return (lam.inp[i] - lam.sensor[sn]) * a.prices.bandwidth[i] *
           deg_ul(sn, c) * s.economics.subcarrier_bandwidth;
  }

  double weighted(const RevenueWeights& lam) const {
    return weighted_sum(total_revenues(s, ctx, a, rates), lam);
  }
};

// Shift the model so it matches the true weighted revenue at the anchor.
// Every non-constant term is exact or tangent there, so after the shift the
// model is a global minorant that touches the truth at the anchor.
void calibrate(ConcaveModel& m, const std::vector<double>& x_anchor,
               double truth) {
  double v = m.eval(x_anchor);
  if (!std::isfinite(v))
    throw std::logic_error("block model undefined at its own anchor");
  m.linear.c0 += truth - v;
}

// Append the epigraph scalar t: one extra variable, +t in the objective,
// -t in every row marked vs_t. The warm t sits a margin below the smallest
// row value at the warm point so the start is strictly feasible.
void attach_epigraph(SubproblemSpec& spec, const std::vector<char>& vs_t) {
  const int ti = spec.dim;
  spec.layout.t_index = ti;
  spec.dim += 1;
  spec.layout.dim = spec.dim;
  spec.objective.linear.add(ti, 1.0);
  std::vector<double> probe = spec.warm;
  probe.push_back(0.0);
  double tw = std::numeric_limits<double>::infinity();
  for (size_t r = 0; r < spec.concave_rows.size(); ++r)
    if (vs_t[r]) tw = std::min(tw, spec.concave_rows[r].expr.eval(probe));
  if (!std::isfinite(tw)) tw = 0.0;
  for (size_t r = 0; r < spec.concave_rows.size(); ++r)
    if (vs_t[r]) {
      spec.concave_rows[r].expr.linear.add(ti, -1.0);
      spec.concave_rows[r].rhs = 0.0;
    }
  const double span = 1.0 + std::abs(tw);
  spec.lower.push_back(tw - 10.0 * span);
  spec.upper.push_back(tw + 1e4 * span);
  spec.warm.push_back(tw - 0.01 * span);
}

// ---- price block ----------------------------------------------------------

// Revenues are affine in the flat price vector and rates are price-free, so
// one rate table serves a probe of every coordinate.
LinExpr price_affine(const BlockContext& bc, const RevenueWeights& lam) {
  const int P = price_vector_size(bc.s);
  Allocation probe = bc.a;
  std::vector<double> flat(P, 0.0);
  probe.prices = unflatten_prices(bc.s, flat);
  double base = weighted_sum(total_revenues(bc.s, bc.ctx, probe, bc.rates), lam);
  LinExpr e;
  e.c0 = base;
  for (int j = 0; j < P; ++j) {
    flat[j] = 1.0;
    probe.prices = unflatten_prices(bc.s, flat);
    e.add(j, weighted_sum(total_revenues(bc.s, bc.ctx, probe, bc.rates), lam) -
                 base);
    flat[j] = 0.0;
  }
  return e;
}

SubproblemSpec build_price_block(const BlockContext& bc,
                                 const ScalarizedObjective& form) {
  const int P = price_vector_size(bc.s);
  SubproblemSpec spec;
  spec.block = Block::price;
  spec.layout.block = Block::price;
  spec.dim = P;
  std::vector<double> ub = price_upper_bounds(bc.s);
  spec.lower.assign(P, 0.0);
  spec.upper = ub;
  spec.warm = flatten_prices(bc.s, bc.a.prices);
  spec.objective.linear = price_affine(bc, form.weights);

  double t_hi = std::numeric_limits<double>::infinity();
  double t_lo = std::numeric_limits<double>::infinity();
  double t_warm = std::numeric_limits<double>::infinity();
  for (const RevenueRow& row : form.rows) {
    LinExpr r = price_affine(bc, row.select);
    double hi = r.c0, lo = r.c0;
    const double cur = r.eval(spec.warm);
    for (const auto& [j, c] : r.terms) {
      hi += std::max(c, 0.0) * ub[j];
      lo += std::min(c, 0.0) * ub[j];
    }
    LinearRowSpec lr;
    lr.row = std::move(r);
    lr.sense = Sense::ge;
    lr.label = row.label;
    if (row.vs_t) {
      lr.row.add(P, -1.0);
      lr.rhs = 0.0;
      t_hi = std::min(t_hi, hi);
      t_lo = std::min(t_lo, lo);
      t_warm = std::min(t_warm, cur);
    } else {
      lr.rhs = row.rhs;
    }
    spec.linear_rows.push_back(std::move(lr));
  }
  if (form.with_t) {
    spec.layout.t_index = P;
    spec.dim = P + 1;
    spec.objective.linear.add(P, 1.0);
    if (!std::isfinite(t_warm)) {
      t_lo = -1.0;
      t_hi = 1.0;
      t_warm = 0.0;
    }
    spec.lower.push_back(t_lo - 1.0);
    spec.upper.push_back(t_hi + 1.0);
    spec.warm.push_back(t_warm - 0.05 * (1.0 + std::abs(t_warm)));
  }
  spec.layout.dim = spec.dim;
  return spec;
}

// ---- alpha block ----------------------------------------------------------

// Variation of the lambda-weighted revenues over [alpha | delta | beta].
// Positive-coefficient min terms ride their epigraph variable (exact at the
// optimum); negative-coefficient min terms and negative service-quality
// terms are linearized at the anchor, keeping the model a concave minorant.
ConcaveModel alpha_variation(const BlockContext& bc, const RevenueWeights& lam,
                             const BlockLayout& lay) {
  const Topology& t = bc.s.topology;
  const EconomicConstants& e = bc.s.economics;
  const int S = t.total_sensors(), U = t.num_users(), V = t.num_isps;
  const std::vector<double>& a0 = bc.a.alpha;
  ConcaveModel m;

  for (int u = 0; u < U; ++u) {
    const int v = t.user_to_isp[u];
    const double lr = bc.a.prices.user_reserv[u];
    const double wq =
        lam.user[u] * (e.user_reservation[u] - lr) + lam.isp[v] * lr;
    if (wq == 0.0) continue;
    LinExpr arg;
    arg.c0 = 1.0;
    double sum0 = 0.0;
    for (int sn = 0; sn < S; ++sn) {
      arg.add(lay.alpha_offset + sn * U + u, 1.0 / S);
      sum0 += a0[sn * U + u];
    }
    if (wq > 0.0) {
      m.logs.push_back({wq * e.sensing_quality_gain, arg});
    } else {
      const double z0 = 1.0 + sum0 / S;
      const double slope = e.sensing_quality_gain / (z0 * S);
      m.linear.c0 += wq * (e.sensing_quality_gain * std::log(z0) -
                           slope * sum0);
      for (int sn = 0; sn < S; ++sn)
        m.linear.add(lay.alpha_offset + sn * U + u, wq * slope);
    }
  }

  for (int v = 0; v < V; ++v)
    for (int sn = 0; sn < S; ++sn) {
      const double wd =
          (lam.sensor[sn] - lam.isp[v]) *
          (bc.a.prices.sensor_data[v * S + sn] +
           bc.a.prices.uplink_rate[sn] * bc.sum_rate[sn]);
      if (wd == 0.0) continue;
      if (wd > 0.0) {
        m.linear.add(lay.delta_offset + v * S + sn, wd);
        continue;
      }
      double y0 = 0.0;
      for (int u : t.users_of_isp[v]) y0 += a0[sn * U + u];
      if (y0 < 1.0) {
        for (int u : t.users_of_isp[v])
          m.linear.add(lay.alpha_offset + sn * U + u, wd);
      } else {
        m.linear.c0 += wd;
      }
    }

  for (int sn = 0; sn < S; ++sn) {
    const double wb = -lam.sensor[sn] * e.sensor_reservation[sn];
    if (wb == 0.0) continue;
    if (wb > 0.0) {
      m.linear.add(lay.beta_offset + sn, wb);
      continue;
    }
    double y0 = 0.0;
    for (int u = 0; u < U; ++u) y0 += a0[sn * U + u];
    if (y0 < 1.0) {
      for (int u = 0; u < U; ++u)
        m.linear.add(lay.alpha_offset + sn * U + u, wb);
    } else {
      m.linear.c0 += wb;
    }
  }
  return m;
}

SubproblemSpec build_alpha_block(const BlockContext& bc,
                                 const ScalarizedObjective& form) {
  const Topology& t = bc.s.topology;
  const int S = t.total_sensors(), U = t.num_users(), V = t.num_isps;
  SubproblemSpec spec;
  spec.block = Block::alpha;
  BlockLayout& lay = spec.layout;
  lay.block = Block::alpha;
  lay.alpha_offset = 0;
  lay.n_alpha = S * U;
  lay.delta_offset = lay.n_alpha;
  lay.n_delta = V * S;
  lay.beta_offset = lay.delta_offset + lay.n_delta;
  lay.n_beta = S;
  spec.dim = lay.beta_offset + lay.n_beta;
  lay.dim = spec.dim;

  spec.lower.assign(spec.dim, 0.0);
  spec.upper.assign(spec.dim, 1.0);
  spec.warm.resize(spec.dim);
  std::copy(bc.a.alpha.begin(), bc.a.alpha.end(), spec.warm.begin());
  for (int v = 0; v < V; ++v)
    for (int sn = 0; sn < S; ++sn)
      spec.warm[lay.delta_offset + v * S + sn] = bc.share[v * S + sn];
  for (int sn = 0; sn < S; ++sn)
    spec.warm[lay.beta_offset + sn] = bc.any_sel[sn];
  const std::vector<double> x_anchor = spec.warm;

  spec.objective = alpha_variation(bc, form.weights, lay);
  calibrate(spec.objective, x_anchor, bc.weighted(form.weights));

  for (int v = 0; v < V; ++v)
    for (int sn = 0; sn < S; ++sn) {
      LinearRowSpec lr;
      for (int u : t.users_of_isp[v])
        lr.row.add(lay.alpha_offset + sn * U + u, 1.0);
      lr.row.add(lay.delta_offset + v * S + sn, -1.0);
      lr.sense = Sense::ge;
      lr.rhs = 0.0;
      lr.label = "share_cap";
      spec.linear_rows.push_back(std::move(lr));
    }
  for (int sn = 0; sn < S; ++sn) {
    LinearRowSpec lr;
    for (int u = 0; u < U; ++u)
      lr.row.add(lay.alpha_offset + sn * U + u, 1.0);
    lr.row.add(lay.beta_offset + sn, -1.0);
    lr.sense = Sense::ge;
    lr.rhs = 0.0;
    lr.label = "reserv_cap";
    spec.linear_rows.push_back(std::move(lr));
  }

  std::vector<char> vs_t;
  for (const RevenueRow& row : form.rows) {
    ConcaveRowSpec cr;
    cr.expr = alpha_variation(bc, row.select, lay);
    calibrate(cr.expr, x_anchor, bc.weighted(row.select));
    cr.rhs = row.vs_t ? 0.0 : row.rhs;
    cr.label = row.label;
    spec.concave_rows.push_back(std::move(cr));
    vs_t.push_back(row.vs_t ? 1 : 0);
  }
  if (form.with_t) attach_epigraph(spec, vs_t);
  return spec;
}

// ---- power and codebook blocks --------------------------------------------

struct RateBundle {
  std::vector<DCRateTerm> dl, ul;
};

// Linear-plus-surrogate model of the lambda-weighted revenue variation over
// the power or codebook variables. `dl_coef`/`ul_coef` give the affine
// coefficient of each variable; the rate terms contribute their per-sign
// minorants.
template <typename DlCoef, typename UlCoef>
ConcaveModel link_variation(const BlockContext& bc, const RevenueWeights& lam,
                            const RateBundle& terms,
                            const std::vector<double>& x_anchor,
                            DlCoef dl_coef, UlCoef ul_coef) {
  ConcaveModel m;
  dl_coef(m);
  ul_coef(m);
  for (const DCRateTerm& t : terms.dl)
    detail::append_surrogate(
        m, bc.dl_rate_weight(lam, t.bs, t.user, t.codebook), t, x_anchor);
  for (const DCRateTerm& t : terms.ul)
    detail::append_surrogate(m, bc.ul_rate_weight(lam, t.sensor), t, x_anchor);
  return m;
}

SubproblemSpec build_power_block(const BlockContext& bc,
                                 const ScalarizedObjective& form) {
  const AllocShape& sh = bc.ctx.shape;
  const Topology& t = bc.s.topology;
  const EconomicConstants& e = bc.s.economics;
  SubproblemSpec spec;
  spec.block = Block::power;
  spec.layout.block = Block::power;

  std::vector<int> var_dl(sh.dl_total, -1), var_ul(sh.ul_total, -1);
  std::vector<char> emit_dl(sh.dl_total, 0), emit_ul(sh.ul_total, 0);
  for (int k = 0; k < sh.dl_total; ++k)
    if (bc.a.dl_assign[k] > 0.0) {
      var_dl[k] = static_cast<int>(spec.layout.dl_vars.size());
      spec.layout.dl_vars.push_back(k);
      emit_dl[k] = 1;
    }
  const int nd = static_cast<int>(spec.layout.dl_vars.size());
  for (int k = 0; k < sh.ul_total; ++k)
    if (bc.a.ul_assign[k] > 0.0) {
      var_ul[k] = nd + static_cast<int>(spec.layout.ul_vars.size());
      spec.layout.ul_vars.push_back(k);
      emit_ul[k] = 1;
    }
  const int nu = static_cast<int>(spec.layout.ul_vars.size());
  spec.dim = nd + nu;
  spec.layout.dim = spec.dim;

  spec.lower.assign(spec.dim, 0.0);
  spec.upper.resize(spec.dim);
  spec.warm.resize(spec.dim);
  std::vector<int> bs_of_flat(sh.dl_total, -1);
  for (int b = 0; b < sh.num_bs; ++b)
    for (int u = 0; u < sh.num_users; ++u)
      for (int c = 0; c < sh.dl_cb[b]; ++c) bs_of_flat[sh.dl(b, u, c)] = b;
  for (int j = 0; j < nd; ++j) {
    const int k = spec.layout.dl_vars[j];
    spec.upper[j] = e.power_cap[bs_of_flat[k]];
    spec.warm[j] = bc.a.dl_power[k];
  }
  for (int j = 0; j < nu; ++j) {
    const int m = spec.layout.ul_vars[j];
    const int sn = std::distance(
        sh.ul_base.begin(),
        std::upper_bound(sh.ul_base.begin(), sh.ul_base.end(), m) - 1);
    spec.upper[nd + j] = e.battery_cap[sn];
    spec.warm[nd + j] = bc.a.ul_power[m];
  }
  const std::vector<double> x_anchor = spec.warm;

  RateBundle terms;
  detail::dl_rate_pairs(bc.s, bc.ctx, bc.a, RateVar::power, var_dl, emit_dl,
                        terms.dl);
  detail::ul_rate_pairs(bc.s, bc.ctx, bc.a, RateVar::power, var_ul, emit_ul,
                        terms.ul);
  for (DCRateTerm& tm : terms.dl) detail::anchor_term(tm, x_anchor);
  for (DCRateTerm& tm : terms.ul) detail::anchor_term(tm, x_anchor);

  auto dl_affine = [&](const RevenueWeights& lam) {
    return [&, lam](ConcaveModel& m) {
      for (int j = 0; j < nd; ++j) {
        const int k = spec.layout.dl_vars[j];
        int b = bs_of_flat[k];
        int u = (k - sh.dl_base[b]) / sh.dl_cb[b];
        m.linear.add(j, bc.dl_energy_coef(lam, b, u) * bc.a.dl_assign[k]);
      }
    };
  };
  auto ul_affine = [&](const RevenueWeights& lam) {
    return [&, lam](ConcaveModel& m) {
      for (int j = 0; j < nu; ++j) {
        const int k = spec.layout.ul_vars[j];
        const int sn = std::distance(
            sh.ul_base.begin(),
            std::upper_bound(sh.ul_base.begin(), sh.ul_base.end(), k) - 1);
        m.linear.add(nd + j, bc.ul_energy_coef(lam, sn) * bc.a.ul_assign[k]);
      }
    };
  };
  auto model_for = [&](const RevenueWeights& lam) {
    return link_variation(bc, lam, terms, x_anchor, dl_affine(lam),
                          ul_affine(lam));
  };

  spec.objective = model_for(form.weights);
  calibrate(spec.objective, x_anchor, bc.weighted(form.weights));

  for (int b = 0; b < sh.num_bs; ++b) {
    LinearRowSpec lr;
    for (int u = 0; u < sh.num_users; ++u)
      for (int c = 0; c < sh.dl_cb[b]; ++c) {
        const int k = sh.dl(b, u, c);
        if (var_dl[k] >= 0) lr.row.add(var_dl[k], bc.a.dl_assign[k]);
      }
    lr.sense = Sense::le;
    lr.rhs = e.power_cap[b];
    lr.label = "bs_power";
    spec.linear_rows.push_back(std::move(lr));
  }
  for (int sn = 0; sn < sh.num_sensors; ++sn) {
    LinearRowSpec lr;
    for (int c = 0; c < sh.ul_cb[sn]; ++c) {
      const int k = sh.ul(sn, c);
      if (var_ul[k] >= 0) lr.row.add(var_ul[k], bc.a.ul_assign[k]);
    }
    lr.sense = Sense::le;
    lr.rhs = e.battery_cap[sn];
    lr.label = "battery";
    spec.linear_rows.push_back(std::move(lr));
  }

  std::vector<char> vs_t;
  for (int u = 0; u < sh.num_users; ++u) {
    ConcaveRowSpec cr;
    for (const DCRateTerm& tm : terms.dl)
      if (tm.user == u) detail::append_surrogate(cr.expr, 1.0, tm, x_anchor);
    cr.rhs = e.min_dl_rate[t.user_to_isp[u]];
    cr.label = "dl_rate";
    spec.concave_rows.push_back(std::move(cr));
    vs_t.push_back(0);
  }
  for (int sn = 0; sn < sh.num_sensors; ++sn) {
    ConcaveRowSpec cr;
    for (const DCRateTerm& tm : terms.ul)
      if (tm.sensor == sn) detail::append_surrogate(cr.expr, 1.0, tm, x_anchor);
    cr.rhs = e.min_ul_rate[sn];
    cr.label = "ul_rate";
    spec.concave_rows.push_back(std::move(cr));
    vs_t.push_back(0);
  }
  for (const RevenueRow& row : form.rows) {
    ConcaveRowSpec cr;
    cr.expr = model_for(row.select);
    calibrate(cr.expr, x_anchor, bc.weighted(row.select));
    cr.rhs = row.vs_t ? 0.0 : row.rhs;
    cr.label = row.label;
    spec.concave_rows.push_back(std::move(cr));
    vs_t.push_back(row.vs_t ? 1 : 0);
  }
  if (form.with_t) attach_epigraph(spec, vs_t);
  return spec;
}

SubproblemSpec build_codebook_block(const BlockContext& bc,
                                    const ScalarizedObjective& form) {
  const AllocShape& sh = bc.ctx.shape;
  const Topology& t = bc.s.topology;
  const EconomicConstants& e = bc.s.economics;
  SubproblemSpec spec;
  spec.block = Block::codebook;
  spec.layout.block = Block::codebook;
  const int nd = sh.dl_total, nu = sh.ul_total;
  spec.dim = nd + nu;
  spec.layout.dim = spec.dim;
  spec.layout.dl_vars.resize(nd);
  spec.layout.ul_vars.resize(nu);
  std::vector<int> var_dl(nd), var_ul(nu);
  for (int k = 0; k < nd; ++k) {
    spec.layout.dl_vars[k] = k;
    var_dl[k] = k;
  }
  for (int k = 0; k < nu; ++k) {
    spec.layout.ul_vars[k] = k;
    var_ul[k] = nd + k;
  }

  spec.lower.assign(spec.dim, 0.0);
  spec.upper.assign(spec.dim, 1.0);
  std::vector<double> x_anchor(spec.dim);
  std::copy(bc.a.dl_assign.begin(), bc.a.dl_assign.end(), x_anchor.begin());
  std::copy(bc.a.ul_assign.begin(), bc.a.ul_assign.end(),
            x_anchor.begin() + nd);
  spec.warm.resize(spec.dim);
  // Pull the start into the interior: pair rows and reuse rows stay strictly
  // slack at half-strength indicators, so no restoration slacks are needed.
  for (int k = 0; k < spec.dim; ++k)
    spec.warm[k] = clamp01(0.5 * x_anchor[k] + 0.02);

  std::vector<char> emit_all_dl(nd, 1), emit_all_ul(nu, 1);
  RateBundle terms;
  detail::dl_rate_pairs(bc.s, bc.ctx, bc.a, RateVar::assign, var_dl,
                        emit_all_dl, terms.dl);
  detail::ul_rate_pairs(bc.s, bc.ctx, bc.a, RateVar::assign, var_ul,
                        emit_all_ul, terms.ul);
  for (DCRateTerm& tm : terms.dl) detail::anchor_term(tm, x_anchor);
  for (DCRateTerm& tm : terms.ul) detail::anchor_term(tm, x_anchor);

  auto dl_affine = [&](const RevenueWeights& lam) {
    return [&, lam](ConcaveModel& m) {
      for (int b = 0; b < sh.num_bs; ++b)
        for (int u = 0; u < sh.num_users; ++u)
          for (int c = 0; c < sh.dl_cb[b]; ++c) {
            const int k = sh.dl(b, u, c);
            m.linear.add(k,
                         bc.dl_energy_coef(lam, b, u) * bc.a.dl_power[k] +
                             bc.dl_band_coef(lam, b, u, c));
          }
    };
  };
  auto ul_affine = [&](const RevenueWeights& lam) {
    return [&, lam](ConcaveModel& m) {
      for (int sn = 0; sn < sh.num_sensors; ++sn)
        for (int c = 0; c < sh.ul_cb[sn]; ++c) {
          const int k = sh.ul(sn, c);
          m.linear.add(nd + k,
                       bc.ul_energy_coef(lam, sn) * bc.a.ul_power[k] +
                           bc.ul_band_coef(lam, sn, c));
        }
    };
  };
  auto model_for = [&](const RevenueWeights& lam) {
    return link_variation(bc, lam, terms, x_anchor, dl_affine(lam),
                          ul_affine(lam));
  };

  spec.objective = model_for(form.weights);
  calibrate(spec.objective, x_anchor, bc.weighted(form.weights));

  // Single-association pairs: at most one (BS, codebook) per user and one
  // codebook per sensor.
  for (int u = 0; u < sh.num_users; ++u) {
    std::vector<int> opts;
    for (int b = 0; b < sh.num_bs; ++b)
      for (int c = 0; c < sh.dl_cb[b]; ++c) opts.push_back(sh.dl(b, u, c));
    for (size_t i = 0; i + 1 < opts.size(); ++i)
      for (size_t j = i + 1; j < opts.size(); ++j) {
        LinearRowSpec lr;
        lr.row.add(opts[i], 1.0);
        lr.row.add(opts[j], 1.0);
        lr.sense = Sense::le;
        lr.rhs = 1.0;
        lr.label = "assoc_dl";
        spec.linear_rows.push_back(std::move(lr));
      }
  }
  for (int sn = 0; sn < sh.num_sensors; ++sn)
    for (int ci = 0; ci + 1 < sh.ul_cb[sn]; ++ci)
      for (int cj = ci + 1; cj < sh.ul_cb[sn]; ++cj) {
        LinearRowSpec lr;
        lr.row.add(nd + sh.ul(sn, ci), 1.0);
        lr.row.add(nd + sh.ul(sn, cj), 1.0);
        lr.sense = Sense::le;
        lr.rhs = 1.0;
        lr.label = "assoc_ul";
        spec.linear_rows.push_back(std::move(lr));
      }

  // Reuse limits per provider and subcarrier, both directions.
  for (int i = 0; i < t.num_inps; ++i) {
    const CodebookMap& cb = bc.s.dl_codebooks[i];
    for (int n = 0; n < t.dl_subcarriers[i]; ++n) {
      LinearRowSpec lr;
      for (int b = t.bs_offset[i]; b < t.bs_offset[i] + t.bs_per_inp[i]; ++b)
        for (int u = 0; u < sh.num_users; ++u)
          for (int c = 0; c < sh.dl_cb[b]; ++c)
            if (cb.uses[c][n]) lr.row.add(sh.dl(b, u, c), 1.0);
      lr.sense = Sense::le;
      lr.rhs = t.reuse_limit;
      lr.label = "reuse_dl";
      spec.linear_rows.push_back(std::move(lr));
    }
  }
  for (int i = 0; i < t.num_inps; ++i) {
    const CodebookMap& cb = bc.s.ul_codebooks[i];
    for (int mcar = 0; mcar < t.ul_subcarriers[i]; ++mcar) {
      LinearRowSpec lr;
      for (int sn = 0; sn < sh.num_sensors; ++sn) {
        if (t.inp_of_bs[t.bs_of_sensor[sn]] != i) continue;
        for (int c = 0; c < sh.ul_cb[sn]; ++c)
          if (cb.uses[c][mcar]) lr.row.add(nd + sh.ul(sn, c), 1.0);
      }
      lr.sense = Sense::le;
      lr.rhs = t.reuse_limit;
      lr.label = "reuse_ul";
      spec.linear_rows.push_back(std::move(lr));
    }
  }

  for (int b = 0; b < sh.num_bs; ++b) {
    LinearRowSpec lr;
    for (int u = 0; u < sh.num_users; ++u)
      for (int c = 0; c < sh.dl_cb[b]; ++c) {
        const int k = sh.dl(b, u, c);
        if (bc.a.dl_power[k] > 0.0) lr.row.add(k, bc.a.dl_power[k]);
      }
    lr.sense = Sense::le;
    lr.rhs = e.power_cap[b];
    lr.label = "bs_power";
    spec.linear_rows.push_back(std::move(lr));
  }
  for (int sn = 0; sn < sh.num_sensors; ++sn) {
    LinearRowSpec lr;
    for (int c = 0; c < sh.ul_cb[sn]; ++c) {
      const int k = sh.ul(sn, c);
      if (bc.a.ul_power[k] > 0.0) lr.row.add(nd + k, bc.a.ul_power[k]);
    }
    lr.sense = Sense::le;
    lr.rhs = e.battery_cap[sn];
    lr.label = "battery";
    spec.linear_rows.push_back(std::move(lr));
  }

  std::vector<char> vs_t;
  for (int u = 0; u < sh.num_users; ++u) {
    ConcaveRowSpec cr;
    for (const DCRateTerm& tm : terms.dl)
      if (tm.user == u) detail::append_surrogate(cr.expr, 1.0, tm, x_anchor);
    cr.rhs = e.min_dl_rate[t.user_to_isp[u]];
    cr.label = "dl_rate";
    spec.concave_rows.push_back(std::move(cr));
    vs_t.push_back(0);
  }
  for (int sn = 0; sn < sh.num_sensors; ++sn) {
    ConcaveRowSpec cr;
    for (const DCRateTerm& tm : terms.ul)
      if (tm.sensor == sn) detail::append_surrogate(cr.expr, 1.0, tm, x_anchor);
    cr.rhs = e.min_ul_rate[sn];
    cr.label = "ul_rate";
    spec.concave_rows.push_back(std::move(cr));
    vs_t.push_back(0);
  }
  for (const RevenueRow& row : form.rows) {
    ConcaveRowSpec cr;
    cr.expr = model_for(row.select);
    calibrate(cr.expr, x_anchor, bc.weighted(row.select));
    cr.rhs = row.vs_t ? 0.0 : row.rhs;
    cr.label = row.label;
    spec.concave_rows.push_back(std::move(cr));
    vs_t.push_back(row.vs_t ? 1 : 0);
  }
  if (form.with_t) attach_epigraph(spec, vs_t);
  return spec;
}

}  // namespace

SubproblemSpec build_block_subproblem(const Scenario& s, const LinkContext& ctx,
                                      const Allocation& a,
                                      const ScalarizedObjective& form,
                                      Block block) {
  BlockContext bc(s, ctx, a);
  switch (block) {
    case Block::price:
      return build_price_block(bc, form);
    case Block::alpha:
      return build_alpha_block(bc, form);
    case Block::power:
      return build_power_block(bc, form);
    case Block::codebook:
      return build_codebook_block(bc, form);
  }
  throw std::logic_error("unknown block");
}

void apply_block_solution(const Scenario& s, const BlockLayout& layout,
                          const std::vector<double>& x, Allocation& a) {
  switch (layout.block) {
    case Block::price: {
      const int P = price_vector_size(s);
      std::vector<double> flat(x.begin(), x.begin() + P);
      a.prices = unflatten_prices(s, flat);
      return;
    }
    case Block::alpha:
      std::copy(x.begin() + layout.alpha_offset,
                x.begin() + layout.alpha_offset + layout.n_alpha,
                a.alpha.begin());
      return;
    case Block::power: {
      const int nd = static_cast<int>(layout.dl_vars.size());
      for (size_t j = 0; j < layout.dl_vars.size(); ++j)
        a.dl_power[layout.dl_vars[j]] = x[j];
      for (size_t j = 0; j < layout.ul_vars.size(); ++j)
        a.ul_power[layout.ul_vars[j]] = x[nd + j];
      return;
    }
    case Block::codebook: {
      const AllocShape sh = AllocShape::of(s);
      std::copy(x.begin(), x.begin() + sh.dl_total, a.dl_assign.begin());
      std::copy(x.begin() + sh.dl_total,
                x.begin() + sh.dl_total + sh.ul_total, a.ul_assign.begin());
      a.relaxed = true;
      return;
    }
  }
}

namespace {

// True when every entity carries the same positive weight, the case where
// all six price families transfer money between equally weighted classes
// and cancel out of the objective entirely.
bool uniform_equal_weights(const RevenueWeights& w) {
  double ref = 0.0;
  bool seen = false;
  auto scan = [&](const std::vector<double>& v) {
    for (double x : v) {
      if (!seen) {
        ref = x;
        seen = true;
      } else if (std::abs(x - ref) > 1e-12 * std::max(1.0, std::abs(ref))) {
        return false;
      }
    }
    return true;
  };
  return scan(w.inp) && scan(w.isp) && scan(w.sensor) && scan(w.user) &&
         seen && ref > 0.0;
}

// An equal-weight objective is blind along every price coordinate, so the
// whole price box is optimal and the step has to pick one point of that
// face. The pick is a fixed market convention, not an optimizer outcome:
// provider classes settle at margins 3:2:1 (infrastructure : service :
// sensing), anchored so the infrastructure class sits at its income
// ceiling with power and bandwidth priced at cap, and the data and
// reservation fractions solved from the volumes of the current allocation.
// Users fund the margins; the sum of all four classes is unaffected.
void settle_price_face(const Scenario& s, BlockContext& bc,
                       const std::vector<double>& ub,
                       const std::vector<int>& ties, std::vector<double>& x) {
  const int P = static_cast<int>(x.size());
  enum Class { kInp, kIsp, kSens, kUser };
  std::vector<std::vector<double>> A(4, std::vector<double>(P, 0.0));
  const RevenueWeights sel[4] = {
      RevenueWeights::all_inps(s), RevenueWeights::all_isps(s),
      RevenueWeights::all_sensors(s), RevenueWeights::all_users(s)};
  for (int c = 0; c < 4; ++c) {
    LinExpr e = price_affine(bc, sel[c]);
    for (const auto& [j, v] : e.terms) A[c][j] += v;
  }

  // Class levels with every price at zero plus any vertex-resolved prices.
  std::vector<char> tied(P, 0);
  for (int j : ties) tied[j] = 1;
  Allocation base = bc.a;
  base.prices = unflatten_prices(s, std::vector<double>(P, 0.0));
  PlayerRevenues r0 = total_revenues(s, base);
  double lvl[4] = {r0.inp_total, r0.isp_total, r0.sensor_total,
                   r0.user_total};
  for (int c = 0; c < 4; ++c)
    for (int j = 0; j < P; ++j)
      if (!tied[j]) lvl[c] += A[c][j] * x[j];

  // Family volumes at cap over the tied coordinates.
  const Topology& t = s.topology;
  enum Family { kPow, kBw, kData, kUl, kDn, kRes };
  std::vector<int> fam(P, kPow);
  {
    int j = 0;
    for (int n = 0; n < t.total_bs(); ++n) fam[j++] = kPow;
    for (int n = 0; n < t.num_inps; ++n) fam[j++] = kBw;
    for (int n = 0; n < t.num_isps * t.total_sensors(); ++n) fam[j++] = kData;
    for (int n = 0; n < t.total_sensors(); ++n) fam[j++] = kUl;
    for (int n = 0; n < t.num_isps; ++n) fam[j++] = kDn;
    for (int n = 0; n < t.num_users(); ++n) fam[j++] = kRes;
  }
  double vol[4][6] = {};
  for (int c = 0; c < 4; ++c)
    for (int j : ties) vol[c][fam[j]] += A[c][j] * ub[j];

  // Tier ladder: power, bandwidth, uplink-rate, and downlink-rate prices go
  // to cap; the data fraction lifts the sensing class to one tier and the
  // reservation fraction lifts the service class to two.
  double g[6] = {1.0, 1.0, 0.0, 1.0, 1.0, 0.0};
  double k3 = lvl[kInp] + vol[kInp][kPow] + vol[kInp][kBw] +
              vol[kInp][kData] + vol[kInp][kUl] + vol[kInp][kDn];
  double tier = k3 / 3.0;
  double sens_fixed = lvl[kSens] + vol[kSens][kPow] + vol[kSens][kBw] +
                      vol[kSens][kUl] + vol[kSens][kDn];
  if (std::abs(vol[kSens][kData]) > 1e-9)
    g[kData] = clamp01((tier - sens_fixed) / vol[kSens][kData]);
  double isp_fixed = lvl[kIsp] + vol[kIsp][kPow] + vol[kIsp][kBw] +
                     vol[kIsp][kUl] + vol[kIsp][kDn] +
                     g[kData] * vol[kIsp][kData];
  if (std::abs(vol[kIsp][kRes]) > 1e-9)
    g[kRes] = clamp01((2.0 * tier - isp_fixed) / vol[kIsp][kRes]);

  for (int j : ties) x[j] = g[fam[j]] * ub[j];
}

}  // namespace

PriceVector solve_price_step(const Scenario& s, const Allocation& a) {
  return solve_price_step(s, a, RevenueWeights::from_scenario(s));
}

PriceVector solve_price_step(const Scenario& s, const Allocation& a,
                             const RevenueWeights& weights) {
  LinkContext ctx = LinkContext::build(s);
  BlockContext bc(s, ctx, a);
  LinExpr e = price_affine(bc, weights);
  const int P = price_vector_size(s);
  std::vector<double> coef(P, 0.0);
  for (const auto& [j, c] : e.terms) coef[j] += c;
  double maxabs = 0.0;
  for (double c : coef) maxabs = std::max(maxabs, std::abs(c));
  const double tol = 1e-10 * std::max(1.0, maxabs);
  std::vector<double> ub = price_upper_bounds(s);
  std::vector<double> x = flatten_prices(s, a.prices);
  std::vector<int> ties;
  for (int j = 0; j < P; ++j) {
    if (coef[j] > tol)
      x[j] = ub[j];
    else if (coef[j] < -tol)
      x[j] = 0.0;
    else
      ties.push_back(j);
  }
  if (!ties.empty()) {
    if (uniform_equal_weights(weights)) {
      settle_price_face(s, bc, ub, ties, x);
    } else {
      // A price the objective cannot see is not charged.
      for (int j : ties) x[j] = 0.0;
    }
  }
  return unflatten_prices(s, x);
}

AlphaStep solve_alpha_step(const Scenario& s, const Allocation& a,
                           const InnerOptions& opts) {
  LinkContext ctx = LinkContext::build(s);
  BlockContext bc(s, ctx, a);
  ScalarizedObjective form;
  form.weights = RevenueWeights::from_scenario(s);
  SubproblemSpec spec = build_alpha_block(bc, form);
  InnerResult res = inner_solve(spec, opts);

  const Topology& t = s.topology;
  const int S = t.total_sensors(), U = t.num_users(), V = t.num_isps;
  AlphaStep out;
  out.alpha.assign(res.x.begin(), res.x.begin() + S * U);
  for (double& v : out.alpha) v = clamp01(v);
  // Epigraph values are reported at their tight solution, recomputed from
  // the final alpha so the output does not depend on solver slack.
  out.delta.assign(static_cast<size_t>(V) * S, 0.0);
  out.beta.assign(S, 0.0);
  for (int sn = 0; sn < S; ++sn) {
    double all = 0.0;
    for (int v = 0; v < V; ++v) {
      double part = 0.0;
      for (int u : t.users_of_isp[v]) part += out.alpha[sn * U + u];
      out.delta[v * S + sn] = std::min(part, 1.0);
      all += part;
    }
    out.beta[sn] = std::min(all, 1.0);
  }
  out.info = std::move(res);
  return out;
}

PowerStep solve_power_step(const Scenario& s, const Allocation& a,
                           const PowerAnchor& anchor,
                           const InnerOptions& opts) {
  Allocation at = a;
  if (anchor.dl.size() != at.dl_power.size() ||
      anchor.ul.size() != at.ul_power.size())
    throw std::invalid_argument("power anchor shape mismatch");
  at.dl_power = anchor.dl;
  at.ul_power = anchor.ul;
  LinkContext ctx = LinkContext::build(s);
  BlockContext bc(s, ctx, at);
  ScalarizedObjective form;
  form.weights = RevenueWeights::from_scenario(s);
  SubproblemSpec spec = build_power_block(bc, form);
  InnerResult res = inner_solve(spec, opts);

  PowerStep out;
  out.dl = at.dl_power;
  out.ul = at.ul_power;
  const int nd = static_cast<int>(spec.layout.dl_vars.size());
  for (size_t j = 0; j < spec.layout.dl_vars.size(); ++j)
    out.dl[spec.layout.dl_vars[j]] = std::max(0.0, res.x[j]);
  for (size_t j = 0; j < spec.layout.ul_vars.size(); ++j)
    out.ul[spec.layout.ul_vars[j]] = std::max(0.0, res.x[nd + j]);
  out.rows_emitted = spec.row_count();
  out.info = std::move(res);
  return out;
}

CodebookStep solve_codebook_step(const Scenario& s, const Allocation& a,
                                 const InnerOptions& opts) {
  LinkContext ctx = LinkContext::build(s);
  BlockContext bc(s, ctx, a);
  ScalarizedObjective form;
  form.weights = RevenueWeights::from_scenario(s);
  SubproblemSpec spec = build_codebook_block(bc, form);
  InnerResult res = inner_solve(spec, opts);

  const AllocShape& sh = ctx.shape;
  CodebookStep out;
  out.dl_relaxed.resize(sh.dl_total);
  out.ul_relaxed.resize(sh.ul_total);
  for (int k = 0; k < sh.dl_total; ++k) out.dl_relaxed[k] = clamp01(res.x[k]);
  for (int k = 0; k < sh.ul_total; ++k)
    out.ul_relaxed[k] = clamp01(res.x[sh.dl_total + k]);
  round_codebooks(s, out.dl_relaxed, out.ul_relaxed, out.dl_rounded,
                  out.ul_rounded, out.unassigned_users, out.unassigned_sensors);
  out.rows_emitted = spec.row_count();
  out.info = std::move(res);
  return out;
}

namespace {

// Relaxed values are quantized to 1e-9 before comparison, so numerically
// equal candidates tie and fall back to the lowest index.
struct RoundPick {
  long long qv;
  int entity, b, c;  // b unused for uplink
};

bool better(const RoundPick& x, const RoundPick& y) {
  if (x.qv != y.qv) return x.qv > y.qv;
  if (x.entity != y.entity) return x.entity < y.entity;
  if (x.b != y.b) return x.b < y.b;
  return x.c < y.c;
}

long long quantize(double v) { return std::llround(v * 1e9); }

}  // namespace

void round_codebooks(const Scenario& s, const std::vector<double>& dl_relaxed,
                     const std::vector<double>& ul_relaxed,
                     std::vector<double>& dl_rounded,
                     std::vector<double>& ul_rounded,
                     std::vector<int>& unassigned_users,
                     std::vector<int>& unassigned_sensors) {
  const AllocShape sh = AllocShape::of(s);
  const Topology& t = s.topology;
  const int K = t.reuse_limit;
  dl_rounded.assign(sh.dl_total, 0.0);
  ul_rounded.assign(sh.ul_total, 0.0);
  unassigned_users.clear();
  unassigned_sensors.clear();

  {
    std::vector<RoundPick> picks;
    picks.reserve(dl_relaxed.size());
    for (int b = 0; b < sh.num_bs; ++b)
      for (int u = 0; u < sh.num_users; ++u)
        for (int c = 0; c < sh.dl_cb[b]; ++c)
          picks.push_back({quantize(dl_relaxed[sh.dl(b, u, c)]), u, b, c});
    std::sort(picks.begin(), picks.end(), better);
    std::vector<char> done(sh.num_users, 0);
    std::vector<std::vector<int>> usage(t.num_inps);
    for (int i = 0; i < t.num_inps; ++i)
      usage[i].assign(t.dl_subcarriers[i], 0);
    for (const RoundPick& p : picks) {
      if (done[p.entity]) continue;
      const int i = t.inp_of_bs[p.b];
      const CodebookMap& cb = s.dl_codebooks[i];
      bool ok = true;
      for (int n = 0; n < t.dl_subcarriers[i]; ++n)
        if (cb.uses[p.c][n] && usage[i][n] + 1 > K) ok = false;
      if (!ok) continue;
      done[p.entity] = 1;
      dl_rounded[sh.dl(p.b, p.entity, p.c)] = 1.0;
      for (int n = 0; n < t.dl_subcarriers[i]; ++n)
        if (cb.uses[p.c][n]) ++usage[i][n];
    }
    for (int u = 0; u < sh.num_users; ++u)
      if (!done[u]) unassigned_users.push_back(u);
  }

  {
    std::vector<RoundPick> picks;
    picks.reserve(ul_relaxed.size());
    for (int sn = 0; sn < sh.num_sensors; ++sn)
      for (int c = 0; c < sh.ul_cb[sn]; ++c)
        picks.push_back({quantize(ul_relaxed[sh.ul(sn, c)]), sn, 0, c});
    std::sort(picks.begin(), picks.end(), better);
    std::vector<char> done(sh.num_sensors, 0);
    std::vector<std::vector<int>> usage(t.num_inps);
    for (int i = 0; i < t.num_inps; ++i)
      usage[i].assign(t.ul_subcarriers[i], 0);
    for (const RoundPick& p : picks) {
      if (done[p.entity]) continue;
      const int i = t.inp_of_bs[t.bs_of_sensor[p.entity]];
      const CodebookMap& cb = s.ul_codebooks[i];
      bool ok = true;
      for (int mcar = 0; mcar < t.ul_subcarriers[i]; ++mcar)
        if (cb.uses[p.c][mcar] && usage[i][mcar] + 1 > K) ok = false;
      if (!ok) continue;
      done[p.entity] = 1;
      ul_rounded[sh.ul(p.entity, p.c)] = 1.0;
      for (int mcar = 0; mcar < t.ul_subcarriers[i]; ++mcar)
        if (cb.uses[p.c][mcar]) ++usage[i][mcar];
    }
    for (int sn = 0; sn < sh.num_sensors; ++sn)
      if (!done[sn]) unassigned_sensors.push_back(sn);
  }
}

}  // namespace iotmarket
