#pragma once

#include <string>
#include <vector>

#include "iotmarket/allocation.hpp"
#include "iotmarket/scenario.hpp"

namespace iotmarket {

/// Codebook-aggregated channel coefficients.
///
/// dl[b][u][c] = sum_n uses[c][n] * split[b][n][c] * dl_gain[b][u][n].
/// For the link (b, u, c) this multiplies rho*p as the signal coefficient;
/// for a victim of BS b on codebook c it is the interference coefficient.
/// ul[b][s][c'] mirrors this for sensor transmissions heard at BS b.
struct LinkGains {
  std::vector<std::vector<std::vector<double>>> dl;
  std::vector<std::vector<std::vector<double>>> ul;
};

LinkGains precompute_link_gains(const Scenario& s);

/// Per-scenario evaluation context shared by the economics and solver layers.
struct LinkContext {
  AllocShape shape;
  LinkGains gains;

  static LinkContext build(const Scenario& s);
};

/// SINRs and spectral efficiencies for every link under one allocation,
/// AllocShape flat order. Entries with rho = 0 are 0.
struct RateTable {
  std::vector<double> sinr_dl, rate_dl;
  std::vector<double> sinr_ul, rate_ul;
};

RateTable compute_rates(const Scenario& s, const LinkContext& ctx,
                        const Allocation& a);

/// Received SINR of user u from BS b on codebook c: the indicator-gated
/// signal over same-provider cross-BS interference plus noise.
double downlink_sinr(const Scenario& s, const Allocation& a, int b, int u,
                     int c);

/// Uplink SINR of sensor s_idx at its serving BS b on codebook c. b must be
/// the sensor's serving BS; other pairings are rejected.
double uplink_sinr(const Scenario& s, const Allocation& a, int b, int s_idx,
                   int c);

/// Spectral efficiency log2(1 + sinr). Rejects negative input.
double rate(double sinr);

struct ConstraintViolation {
  std::string family;        // association | reuse_dl | reuse_ul | bs_power |
                             // battery | dl_rate | ul_rate | domain
  std::vector<int> index;    // family-specific index tuple
  double lhs = 0, rhs = 0;   // as evaluated
  double slack = 0;          // rhs - lhs for <=, lhs - rhs for >=; < 0 here
};

struct ConstraintReport {
  std::vector<ConstraintViolation> violations;
  bool feasible = true;
};

/// Audit every constraint family: single-BS association pairs, per-subcarrier
/// reuse <= K, per-BS power caps, per-sensor battery caps, per-user DL rate
/// floors, per-sensor UL rate floors, and variable domains (binary unless
/// relaxed). Boundary equality is feasible; violations beyond a 1e-9-scaled
/// tolerance are recorded.
ConstraintReport check_constraints(const Scenario& s, const Allocation& a);

}  // namespace iotmarket
