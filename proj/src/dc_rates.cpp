#include <cmath>
#include <stdexcept>

#include "kernel_detail.hpp"

namespace iotmarket {

namespace detail {

namespace {
const double kLn2 = std::log(2.0);

// Adds one link's contribution (gain * rho * p) to an affine form: a block
// variable scaled by the fixed factor, or a constant when var < 0.
void add_link(LinExpr& e, int var, double gain, double rho, double p,
              RateVar mode) {
  if (mode == RateVar::power) {
    if (rho == 0.0) return;
    if (var >= 0)
      e.add(var, gain * rho);
    else
      e.c0 += gain * rho * p;
  } else {
    if (var >= 0)
      e.add(var, gain * p);
    else
      e.c0 += gain * rho * p;
  }
}
}  // namespace

void dl_rate_pairs(const Scenario& s, const LinkContext& ctx,
                   const Allocation& a, RateVar mode,
                   const std::vector<int>& var_of,
                   const std::vector<char>& emit,
                   std::vector<DCRateTerm>& out) {
  const Topology& t = s.topology;
  const AllocShape& sh = ctx.shape;
  const int B = sh.num_bs, U = sh.num_users;
  for (int b = 0; b < B; ++b) {
    int i = t.inp_of_bs[b];
    for (int u = 0; u < U; ++u) {
      for (int c = 0; c < sh.dl_cb[b]; ++c) {
        int k0 = sh.dl(b, u, c);
        if (!emit[k0]) continue;
        DCRateTerm term;
        term.bs = b;
        term.user = u;
        term.codebook = c;
        term.flat = k0;
        LinExpr inter;
        inter.c0 = s.channels.noise_dl;
        for (int b2 = 0; b2 < B; ++b2) {
          if (b2 == b || t.inp_of_bs[b2] != i) continue;
          double gain = ctx.gains.dl[b2][u][c];
          for (int u2 = 0; u2 < U; ++u2) {
            int j = sh.dl(b2, u2, c);
            add_link(inter, var_of[j], gain, a.dl_assign[j], a.dl_power[j],
                     mode);
          }
        }
        term.g_arg = inter;
        term.f_arg = inter;
        add_link(term.f_arg, var_of[k0], ctx.gains.dl[b][u][c],
                 a.dl_assign[k0], a.dl_power[k0], mode);
        out.push_back(std::move(term));
      }
    }
  }
}

void ul_rate_pairs(const Scenario& s, const LinkContext& ctx,
                   const Allocation& a, RateVar mode,
                   const std::vector<int>& var_of,
                   const std::vector<char>& emit,
                   std::vector<DCRateTerm>& out) {
  const Topology& t = s.topology;
  const AllocShape& sh = ctx.shape;
  const int S = sh.num_sensors;
  for (int sn = 0; sn < S; ++sn) {
    int b = t.bs_of_sensor[sn];
    int i = t.inp_of_bs[b];
    for (int c = 0; c < sh.ul_cb[sn]; ++c) {
      int m0 = sh.ul(sn, c);
      if (!emit[m0]) continue;
      DCRateTerm term;
      term.sensor = sn;
      term.codebook = c;
      term.flat = m0;
      LinExpr inter;
      inter.c0 = s.channels.noise_ul;
      for (int s2 = 0; s2 < S; ++s2) {
        int b2 = t.bs_of_sensor[s2];
        if (b2 == b || t.inp_of_bs[b2] != i) continue;
        int j = sh.ul(s2, c);
        add_link(inter, var_of[j], ctx.gains.ul[b][s2][c], a.ul_assign[j],
                 a.ul_power[j], mode);
      }
      term.g_arg = inter;
      term.f_arg = inter;
      add_link(term.f_arg, var_of[m0], ctx.gains.ul[b][sn][c],
               a.ul_assign[m0], a.ul_power[m0], mode);
      out.push_back(std::move(term));
    }
  }
}

void anchor_term(DCRateTerm& t, const std::vector<double>& anchor) {
  double g0 = t.g_arg.eval(anchor);
  if (!(g0 > 0.0))
    throw std::invalid_argument("rate linearization: nonpositive denominator");
  t.g_at_anchor = std::log2(g0);
  t.g_grad.clear();
  for (const auto& [i, c] : t.g_arg.terms)
    t.g_grad.emplace_back(i, c / (kLn2 * g0));
  t.surr_const = -t.g_at_anchor;
  for (const auto& [i, c] : t.g_grad) t.surr_const += c * anchor[i];
}

void append_surrogate(ConcaveModel& target, double w, const DCRateTerm& t,
                      const std::vector<double>& anchor) {
  if (w == 0.0) return;
  if (w > 0.0) {
    target.logs.push_back({w / kLn2, t.f_arg});
    target.linear.c0 += w * t.surr_const;
    for (const auto& [i, c] : t.g_grad) target.linear.add(i, -w * c);
  } else {
    target.logs.push_back({-w / kLn2, t.g_arg});
    double f0 = t.f_arg.eval(anchor);
    double base = std::log2(f0);
    target.linear.c0 += w * base;
    for (const auto& [i, c] : t.f_arg.terms) {
      double fc = c / (kLn2 * f0);
      target.linear.c0 -= w * fc * anchor[i];
      target.linear.add(i, w * fc);
    }
  }
}

}  // namespace detail

namespace {

DCLinearization linearize_direction(const Scenario& s, const Allocation& a,
                                    const std::vector<double>& anchor,
                                    bool downlink) {
  LinkContext ctx = LinkContext::build(s);
  const auto& assign = downlink ? a.dl_assign : a.ul_assign;
  const int total = static_cast<int>(assign.size());
  if (static_cast<int>(anchor.size()) != total)
    throw std::invalid_argument("dc_linearize: anchor size mismatch");
  for (double p : anchor)
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("dc_linearize: anchor outside domain");

  std::vector<int> var_of(total);
  for (int k = 0; k < total; ++k) var_of[k] = k;
  std::vector<char> emit(total);
  for (int k = 0; k < total; ++k) emit[k] = assign[k] > 0.0;

  DCLinearization lin;
  lin.anchor = anchor;
  if (downlink)
    detail::dl_rate_pairs(s, ctx, a, detail::RateVar::power, var_of, emit,
                          lin.terms);
  else
    detail::ul_rate_pairs(s, ctx, a, detail::RateVar::power, var_of, emit,
                          lin.terms);
  for (DCRateTerm& t : lin.terms) detail::anchor_term(t, anchor);
  return lin;
}

}  // namespace

DCLinearization dc_linearize_downlink(const Scenario& s, const Allocation& a,
                                      const std::vector<double>& anchor) {
  return linearize_direction(s, a, anchor, true);
}

DCLinearization dc_linearize_uplink(const Scenario& s, const Allocation& a,
                                    const std::vector<double>& anchor) {
  return linearize_direction(s, a, anchor, false);
}

}  // namespace iotmarket
