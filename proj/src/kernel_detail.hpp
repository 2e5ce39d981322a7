#pragma once

// Internals shared by the convex-kernel translation units: affine rate-pair
// builders and the per-sign surrogate append used by every block builder.

#include <vector>

#include "iotmarket/convex_kernel.hpp"

namespace iotmarket::detail {

enum class RateVar { power, assign };

/// Build the affine (f_arg, g_arg) pair of every emitted rate term over the
/// block variables. var_of maps a flat link index to its block variable, or
/// -1 to fold the link's stored rho*p contribution into the constants. In
/// power mode links with rho = 0 vanish; in assign mode every link of the
/// victim's provider contributes with its stored power.
void dl_rate_pairs(const Scenario& s, const LinkContext& ctx,
                   const Allocation& a, RateVar mode,
                   const std::vector<int>& var_of,
                   const std::vector<char>& emit, std::vector<DCRateTerm>& out);

/// Uplink mirror: victim is the sensor's serving BS; interferers are the
/// same provider's sensors at other BSs on the same codebook.
void ul_rate_pairs(const Scenario& s, const LinkContext& ctx,
                   const Allocation& a, RateVar mode,
                   const std::vector<int>& var_of,
                   const std::vector<char>& emit, std::vector<DCRateTerm>& out);

/// Fill the anchor-dependent fields (g_at_anchor, g_grad, surr_const) for a
/// term whose affine pair is already built. anchor is in block coordinates.
void anchor_term(DCRateTerm& t, const std::vector<double>& anchor);

/// Append w * rate to the model as a concave minorant that touches the true
/// rate at the anchor: for w > 0 the subtracted log is linearized, for w < 0
/// the leading log is. w = 0 appends nothing.
void append_surrogate(ConcaveModel& target, double w, const DCRateTerm& t,
                      const std::vector<double>& anchor);

}  // namespace iotmarket::detail
