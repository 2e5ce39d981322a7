#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace iotmarket {

/// Player and resource counts plus the user->ISP partition.
///
/// Base stations are numbered globally, grouped by provider: BSs of provider i
/// occupy a contiguous index range, BS 0 of each provider is the macro cell.
/// Sensors are numbered globally, grouped by their serving BS. Users are
/// numbered globally, grouped by ISP.
struct Topology {
  int num_inps = 0;                  // I
  std::vector<int> bs_per_inp;       // B_i, one entry per provider
  int sensors_per_bs = 0;            // S_bi, uniform over BSs
  int num_isps = 0;                  // V
  int users_per_isp = 0;
  std::vector<int> user_to_isp;      // per user, values in [0, num_isps)
  std::vector<int> dl_subcarriers;   // N_i per provider
  std::vector<int> ul_subcarriers;   // M_i per provider
  std::vector<int> dl_codebooks;     // C_i per provider
  std::vector<int> ul_codebooks;     // C'_i per provider
  int reuse_limit = 1;               // K, max codewords per subcarrier

  // Derived index maps, filled by finalize().
  std::vector<int> inp_of_bs;        // per global BS
  std::vector<int> bs_offset;        // first global BS of provider i
  std::vector<int> bs_of_sensor;     // per global sensor
  std::vector<int> sensor_offset;    // first global sensor of BS b
  std::vector<std::vector<int>> users_of_isp;

  int total_bs() const { return static_cast<int>(inp_of_bs.size()); }
  int total_sensors() const { return static_cast<int>(bs_of_sensor.size()); }
  int num_users() const { return static_cast<int>(user_to_isp.size()); }

  /// Rebuild the derived index maps from the primary fields.
  void finalize();
};

/// Incidence and power-split description of one direction's codebooks for one
/// provider. `uses[c][n]` flags subcarrier membership; `split[b][n][c]` is the
/// fraction of codebook c's power on subcarrier n at BS b (b local to the
/// provider), summing to 1 over n for every (b, c).
struct CodebookMap {
  std::vector<std::vector<std::uint8_t>> uses;
  std::vector<std::vector<std::vector<double>>> split;

  int num_codebooks() const { return static_cast<int>(uses.size()); }
  int num_subcarriers() const {
    return uses.empty() ? 0 : static_cast<int>(uses[0].size());
  }
  /// Number of subcarriers codebook c occupies.
  int degree(int c) const;
};

/// Linear power gains and noise levels for every potential link.
///
/// dl_gain[b][u][n]: BS b to user u on DL subcarrier n of b's provider.
/// ul_gain[b][s][m]: sensor s to BS b on UL subcarrier m of b's provider.
/// Gains are power gains (the squared-envelope fading times the distance
/// power law), so they multiply transmit powers directly. Noise is uniform
/// across links; accessors keep the per-link shape of the model.
struct ChannelState {
  std::vector<std::vector<std::vector<double>>> dl_gain;
  std::vector<std::vector<std::vector<double>>> ul_gain;
  double noise_dl = 0.01;
  double noise_ul = 0.01;
  std::vector<std::vector<double>> user_distance;    // [b][u] meters
  std::vector<std::vector<double>> sensor_distance;  // [b][s] meters
  double path_loss_exp = -3.0;
  double reference_distance = 100.0;  // meters; distances are normalized by
                                      // this before the power law is applied
};

/// Price caps, external unit costs, QoS floors, and objective weights.
struct EconomicConstants {
  double power_supplier_price = 0.1;       // per Watt, external cost
  std::vector<double> regulator_bw_price;  // per Hz, per provider
  std::vector<double> sensor_reservation;  // per sensor, external cost
  std::vector<double> user_reservation;    // per user, external income
  double sensing_quality_gain = 1.0;       // scalar gain in service quality
  double subcarrier_bandwidth = 1.0;       // W_S in Hz
  std::vector<double> dl_band;             // N_i * W_S per provider
  std::vector<double> ul_band;             // M_i * W_S per provider
  double price_scale = 1e5;                // SF, scales the money-like caps
  double price_cap = 1.0;                  // L_max
  std::vector<double> power_cap;           // per BS, Watts
  std::vector<double> battery_cap;         // per sensor, Watts
  std::vector<double> min_dl_rate;         // per ISP, bps/Hz, per user floor
  std::vector<double> min_ul_rate;         // per sensor, bps/Hz
  std::vector<double> weight_isp;
  std::vector<double> weight_user;
  std::vector<double> weight_inp;
  std::vector<double> weight_sensor;
};

/// Immutable description of one problem instance. Construct through
/// generate_scenario or by filling the fields and calling Topology::finalize;
/// treat as read-only afterwards.
struct Scenario {
  Topology topology;
  std::vector<CodebookMap> dl_codebooks;  // per provider
  std::vector<CodebookMap> ul_codebooks;  // per provider
  ChannelState channels;
  EconomicConstants economics;
  std::uint64_t seed = 0;
};

/// Generator knobs, normally read from a config file. Scalar fields fan out
/// to the per-entity vectors in Scenario.
struct ScenarioConfig {
  // [topology]
  int num_inps = 2;
  int bs_per_inp = 2;
  int sensors_per_bs = 3;
  int num_isps = 2;
  int users_per_isp = 4;
  int dl_subcarriers = 4;
  int ul_subcarriers = 4;
  int dl_codebooks = 6;
  int ul_codebooks = 6;
  int reuse_limit = 6;
  // [codebooks]
  int dl_degree = 2;
  int ul_degree = 2;
  // [channels]
  double path_loss_exp = -3.0;
  double noise = 0.01;
  double macro_radius = 500.0;
  double femto_radius = 50.0;
  double reference_distance = 100.0;
  // [economics]
  double power_supplier_price = 0.1;
  double regulator_bw_price = 0.1;
  double sensor_reservation = 1.0;
  double user_reservation = 100.0;
  double sensing_quality_gain = 1.0;
  double subcarrier_bandwidth = 1.0;
  double price_scale = 1e5;
  double price_cap = 1.0;
  double power_cap_macro = 50.0;
  double power_cap_femto = 1.0;
  double battery_cap = 0.1;
  double min_dl_rate = 0.1;
  double min_ul_rate = 0.01;
  double weight_isp = 1.0;
  double weight_user = 1.0;
  double weight_inp = 1.0;
  double weight_sensor = 1.0;
};

/// Baseline evaluation setup: 2 providers with one macro (50 W) and one femto
/// (1 W) each, 2 ISPs with 4 users each, 3 sensors per BS, 4 subcarriers and
/// 6 degree-2 codebooks per direction.
ScenarioConfig default_scenario_config();

struct ValidationIssue {
  std::string path;     // dotted field path, e.g. "codebooks.dl[0].split"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// First C distinct d_f-subsets of {0..N-1} in lexicographic order, uniform
/// power split 1/d_f replicated for B stations. The last split entry of each
/// codebook absorbs the rounding remainder so the per-codebook split sums to
/// exactly 1.0 in double arithmetic.
/// Throws std::invalid_argument when C exceeds binomial(N, d_f) or d_f is out
/// of range.
CodebookMap build_codebook_map(int num_subcarriers, int num_codebooks,
                               int degree, int num_bs);

/// Deterministic scenario synthesis: positions drawn uniformly in the cell
/// discs, squared-envelope Rayleigh fading per (link, subcarrier), gain =
/// fading * (D / D_ref)^xi. Identical (config, seed) pairs produce identical
/// scenarios. Throws std::invalid_argument naming the offending field when the
/// config fails schema validation.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// Audit every structural invariant; the report lists one entry per violation
/// and is empty for a valid scenario.
ValidationReport validate_scenario(const Scenario& s);

/// Parse the INI-style scenario config (sections [topology], [codebooks],
/// [channels], [economics]). Unknown sections or keys are rejected with the
/// offending name in the exception message.
ScenarioConfig parse_scenario_config_text(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

}  // namespace iotmarket
