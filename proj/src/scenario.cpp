#include "iotmarket/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace iotmarket {

void Topology::finalize() {
  inp_of_bs.clear();
  bs_offset.assign(num_inps, 0);
  for (int i = 0; i < num_inps; ++i) {
    bs_offset[i] = static_cast<int>(inp_of_bs.size());
    int bi = (i < static_cast<int>(bs_per_inp.size())) ? bs_per_inp[i] : 0;
    for (int b = 0; b < bi; ++b) inp_of_bs.push_back(i);
  }
  bs_of_sensor.clear();
  sensor_offset.assign(inp_of_bs.size(), 0);
  for (int b = 0; b < total_bs(); ++b) {
    sensor_offset[b] = static_cast<int>(bs_of_sensor.size());
    for (int k = 0; k < sensors_per_bs; ++k) bs_of_sensor.push_back(b);
  }
  users_of_isp.assign(num_isps, {});
  for (int u = 0; u < num_users(); ++u) {
    int v = user_to_isp[u];
    if (v >= 0 && v < num_isps) users_of_isp[v].push_back(u);
  }
}

int CodebookMap::degree(int c) const {
  int d = 0;
  for (std::uint8_t x : uses[c]) d += (x != 0);
  return d;
}

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// Deterministic sample stream over a fixed engine. std:: distributions are
// implementation-defined, so the mappings from raw bits are spelled out here.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // in [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  int uniform_int(int n) {  // in [0, n)
    return std::min(n - 1, static_cast<int>(uniform() * n));
  }
  double exponential() {  // mean 1; squared-envelope Rayleigh fading
    return -std::log1p(-uniform());
  }

 private:
  std::mt19937_64 eng_;
};

struct Point {
  double x = 0, y = 0;
};

double dist(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void require(bool cond, const std::string& field, const std::string& what) {
  if (!cond) throw std::invalid_argument("scenario config: " + field + " " + what);
}

}  // namespace

CodebookMap build_codebook_map(int num_subcarriers, int num_codebooks,
                               int degree, int num_bs) {
  if (degree < 1 || degree > num_subcarriers)
    throw std::invalid_argument("codebook degree must be in [1, subcarriers]");
  if (num_codebooks < 1 || num_bs < 1)
    throw std::invalid_argument("codebook and BS counts must be >= 1");
  if (static_cast<long long>(num_codebooks) > binomial(num_subcarriers, degree))
    throw std::invalid_argument(
        "codebook count exceeds the number of distinct subcarrier subsets");

  CodebookMap map;
  map.uses.assign(num_codebooks, std::vector<std::uint8_t>(num_subcarriers, 0));
  std::vector<int> subset(degree);
  for (int j = 0; j < degree; ++j) subset[j] = j;
  for (int c = 0; c < num_codebooks; ++c) {
    for (int j : subset) map.uses[c][j] = 1;
    // Advance to the next d_f-subset in lexicographic order.
    int j = degree - 1;
    while (j >= 0 && subset[j] == num_subcarriers - degree + j) --j;
    if (j >= 0) {
      ++subset[j];
      for (int k = j + 1; k < degree; ++k) subset[k] = subset[k - 1] + 1;
    }
  }

  // Uniform split 1/d_f. The last used subcarrier takes 1 minus the partial
  // sum so that summing the splits in subcarrier order yields exactly 1.0.
  map.split.assign(
      num_bs, std::vector<std::vector<double>>(
                  num_subcarriers, std::vector<double>(num_codebooks, 0.0)));
  for (int c = 0; c < num_codebooks; ++c) {
    int last = -1;
    for (int n = 0; n < num_subcarriers; ++n)
      if (map.uses[c][n]) last = n;
    double partial = 0.0;
    for (int n = 0; n < num_subcarriers; ++n) {
      if (!map.uses[c][n]) continue;
      double value = (n == last) ? 1.0 - partial : 1.0 / degree;
      partial += value;
      for (int b = 0; b < num_bs; ++b) map.split[b][n][c] = value;
    }
  }
  return map;
}

ScenarioConfig default_scenario_config() { return ScenarioConfig{}; }

namespace {

void check_config(const ScenarioConfig& c) {
  require(c.num_inps >= 1, "topology.num_inps", "must be >= 1");
  require(c.bs_per_inp >= 1, "topology.bs_per_inp", "must be >= 1");
  require(c.sensors_per_bs >= 1, "topology.sensors_per_bs", "must be >= 1");
  require(c.num_isps >= 1, "topology.num_isps", "must be >= 1");
  require(c.users_per_isp >= 1, "topology.users_per_isp", "must be >= 1");
  require(c.dl_subcarriers >= 1, "topology.dl_subcarriers", "must be >= 1");
  require(c.ul_subcarriers >= 1, "topology.ul_subcarriers", "must be >= 1");
  require(c.dl_codebooks >= 1, "topology.dl_codebooks", "must be >= 1");
  require(c.ul_codebooks >= 1, "topology.ul_codebooks", "must be >= 1");
  require(c.reuse_limit >= 1, "topology.reuse_limit", "must be >= 1");
  require(c.dl_degree >= 1 && c.dl_degree <= c.dl_subcarriers,
          "codebooks.dl_degree", "must be in [1, dl_subcarriers]");
  require(c.ul_degree >= 1 && c.ul_degree <= c.ul_subcarriers,
          "codebooks.ul_degree", "must be in [1, ul_subcarriers]");
  require(c.dl_codebooks <= binomial(c.dl_subcarriers, c.dl_degree),
          "topology.dl_codebooks", "exceeds distinct subset count");
  require(c.ul_codebooks <= binomial(c.ul_subcarriers, c.ul_degree),
          "topology.ul_codebooks", "exceeds distinct subset count");
  require(c.path_loss_exp < 0, "channels.path_loss_exp", "must be < 0");
  require(c.noise > 0, "channels.noise", "must be > 0");
  require(c.macro_radius > 0, "channels.macro_radius", "must be > 0");
  require(c.femto_radius > 0, "channels.femto_radius", "must be > 0");
  require(c.reference_distance > 0, "channels.reference_distance",
          "must be > 0");
  require(c.power_supplier_price >= 0, "economics.power_supplier_price",
          "must be >= 0");
  require(c.regulator_bw_price >= 0, "economics.regulator_bw_price",
          "must be >= 0");
  require(c.sensor_reservation >= 0, "economics.sensor_reservation",
          "must be >= 0");
  require(c.user_reservation >= 0, "economics.user_reservation",
          "must be >= 0");
  require(c.sensing_quality_gain >= 0, "economics.sensing_quality_gain",
          "must be >= 0");
  require(c.subcarrier_bandwidth > 0, "economics.subcarrier_bandwidth",
          "must be > 0");
  require(c.price_scale > 0, "economics.price_scale", "must be > 0");
  require(c.price_cap >= 0, "economics.price_cap", "must be >= 0");
  require(c.power_cap_macro > 0, "economics.power_cap_macro", "must be > 0");
  require(c.power_cap_femto > 0, "economics.power_cap_femto", "must be > 0");
  require(c.battery_cap > 0, "economics.battery_cap", "must be > 0");
  require(c.min_dl_rate >= 0, "economics.min_dl_rate", "must be >= 0");
  require(c.min_ul_rate >= 0, "economics.min_ul_rate", "must be >= 0");
  require(c.weight_isp >= 0 && c.weight_user >= 0 && c.weight_inp >= 0 &&
              c.weight_sensor >= 0,
          "economics.weight_*", "must be >= 0");
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  check_config(config);

  Scenario s;
  s.seed = seed;
  Topology& t = s.topology;
  t.num_inps = config.num_inps;
  t.bs_per_inp.assign(config.num_inps, config.bs_per_inp);
  t.sensors_per_bs = config.sensors_per_bs;
  t.num_isps = config.num_isps;
  t.users_per_isp = config.users_per_isp;
  t.user_to_isp.resize(config.num_isps * config.users_per_isp);
  for (int u = 0; u < static_cast<int>(t.user_to_isp.size()); ++u)
    t.user_to_isp[u] = u / config.users_per_isp;
  t.dl_subcarriers.assign(config.num_inps, config.dl_subcarriers);
  t.ul_subcarriers.assign(config.num_inps, config.ul_subcarriers);
  t.dl_codebooks.assign(config.num_inps, config.dl_codebooks);
  t.ul_codebooks.assign(config.num_inps, config.ul_codebooks);
  t.reuse_limit = config.reuse_limit;
  t.finalize();

  for (int i = 0; i < t.num_inps; ++i) {
    s.dl_codebooks.push_back(build_codebook_map(
        config.dl_subcarriers, config.dl_codebooks, config.dl_degree,
        t.bs_per_inp[i]));
    s.ul_codebooks.push_back(build_codebook_map(
        config.ul_subcarriers, config.ul_codebooks, config.ul_degree,
        t.bs_per_inp[i]));
  }

  // Geometry: macro cells side by side on the x axis, femtos of each provider
  // evenly spaced on a circle of half the macro radius around the macro.
  const int B = t.total_bs();
  const int S = t.total_sensors();
  const int U = t.num_users();
  std::vector<Point> bs_pos(B);
  std::vector<double> bs_radius(B);
  for (int b = 0; b < B; ++b) {
    int i = t.inp_of_bs[b];
    int local = b - t.bs_offset[i];
    Point center{2.2 * config.macro_radius * i, 0.0};
    if (local == 0) {
      bs_pos[b] = center;
      bs_radius[b] = config.macro_radius;
    } else {
      int femtos = t.bs_per_inp[i] - 1;
      double angle = 2.0 * M_PI * (local - 1) / femtos;
      bs_pos[b] = Point{center.x + 0.5 * config.macro_radius * std::cos(angle),
                        center.y + 0.5 * config.macro_radius * std::sin(angle)};
      bs_radius[b] = config.femto_radius;
    }
  }

  SampleStream rng(seed);
  auto in_disc = [&](const Point& center, double radius) {
    double r = radius * std::sqrt(rng.uniform());
    double a = 2.0 * M_PI * rng.uniform();
    return Point{center.x + r * std::cos(a), center.y + r * std::sin(a)};
  };

  std::vector<Point> user_pos(U);
  for (int u = 0; u < U; ++u) {
    int i = rng.uniform_int(t.num_inps);
    user_pos[u] = in_disc(bs_pos[t.bs_offset[i]], config.macro_radius);
  }
  std::vector<Point> sensor_pos(S);
  for (int sidx = 0; sidx < S; ++sidx) {
    int b = t.bs_of_sensor[sidx];
    sensor_pos[sidx] = in_disc(bs_pos[b], bs_radius[b]);
  }

  ChannelState& ch = s.channels;
  ch.noise_dl = config.noise;
  ch.noise_ul = config.noise;
  ch.path_loss_exp = config.path_loss_exp;
  ch.reference_distance = config.reference_distance;
  ch.user_distance.assign(B, std::vector<double>(U, 0.0));
  ch.sensor_distance.assign(B, std::vector<double>(S, 0.0));
  for (int b = 0; b < B; ++b) {
    for (int u = 0; u < U; ++u)
      ch.user_distance[b][u] = std::max(1.0, dist(bs_pos[b], user_pos[u]));
    for (int sidx = 0; sidx < S; ++sidx)
      ch.sensor_distance[b][sidx] =
          std::max(1.0, dist(bs_pos[b], sensor_pos[sidx]));
  }

  auto path_gain = [&](double d) {
    return std::pow(d / config.reference_distance, config.path_loss_exp);
  };
  ch.dl_gain.assign(B, {});
  ch.ul_gain.assign(B, {});
  for (int b = 0; b < B; ++b) {
    int i = t.inp_of_bs[b];
    ch.dl_gain[b].assign(U, std::vector<double>(t.dl_subcarriers[i], 0.0));
    for (int u = 0; u < U; ++u)
      for (int n = 0; n < t.dl_subcarriers[i]; ++n)
        ch.dl_gain[b][u][n] =
            rng.exponential() * path_gain(ch.user_distance[b][u]);
    ch.ul_gain[b].assign(S, std::vector<double>(t.ul_subcarriers[i], 0.0));
    for (int sidx = 0; sidx < S; ++sidx)
      for (int m = 0; m < t.ul_subcarriers[i]; ++m)
        ch.ul_gain[b][sidx][m] =
            rng.exponential() * path_gain(ch.sensor_distance[b][sidx]);
  }

  EconomicConstants& e = s.economics;
  e.power_supplier_price = config.power_supplier_price;
  e.regulator_bw_price.assign(t.num_inps, config.regulator_bw_price);
  e.sensor_reservation.assign(S, config.sensor_reservation);
  e.user_reservation.assign(U, config.user_reservation);
  e.sensing_quality_gain = config.sensing_quality_gain;
  e.subcarrier_bandwidth = config.subcarrier_bandwidth;
  e.dl_band.resize(t.num_inps);
  e.ul_band.resize(t.num_inps);
  for (int i = 0; i < t.num_inps; ++i) {
    e.dl_band[i] = t.dl_subcarriers[i] * config.subcarrier_bandwidth;
    e.ul_band[i] = t.ul_subcarriers[i] * config.subcarrier_bandwidth;
  }
  e.price_scale = config.price_scale;
  e.price_cap = config.price_cap;
  e.power_cap.resize(B);
  for (int b = 0; b < B; ++b) {
    int i = t.inp_of_bs[b];
    e.power_cap[b] = (b == t.bs_offset[i]) ? config.power_cap_macro
                                           : config.power_cap_femto;
  }
  e.battery_cap.assign(S, config.battery_cap);
  e.min_dl_rate.assign(t.num_isps, config.min_dl_rate);
  e.min_ul_rate.assign(S, config.min_ul_rate);
  e.weight_isp.assign(t.num_isps, config.weight_isp);
  e.weight_user.assign(U, config.weight_user);
  e.weight_inp.assign(t.num_inps, config.weight_inp);
  e.weight_sensor.assign(S, config.weight_sensor);
  return s;
}

namespace {

void issue(ValidationReport& r, const std::string& path,
           const std::string& message) {
  r.issues.push_back({path, message});
}

template <typename T>
bool sized(ValidationReport& r, const std::vector<T>& v, size_t n,
           const std::string& path) {
  if (v.size() != n) {
    issue(r, path, "expected " + std::to_string(n) + " entries, found " +
                       std::to_string(v.size()));
    return false;
  }
  return true;
}

}  // namespace

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport r;
  const Topology& t = s.topology;
  if (t.num_inps < 1) issue(r, "topology.num_inps", "must be >= 1");
  if (t.num_isps < 1) issue(r, "topology.num_isps", "must be >= 1");
  if (t.sensors_per_bs < 1) issue(r, "topology.sensors_per_bs", "must be >= 1");
  if (t.reuse_limit < 1) issue(r, "topology.reuse_limit", "must be >= 1");
  if (!sized(r, t.bs_per_inp, t.num_inps, "topology.bs_per_inp")) return r;
  if (!sized(r, t.dl_subcarriers, t.num_inps, "topology.dl_subcarriers") ||
      !sized(r, t.ul_subcarriers, t.num_inps, "topology.ul_subcarriers") ||
      !sized(r, t.dl_codebooks, t.num_inps, "topology.dl_codebooks") ||
      !sized(r, t.ul_codebooks, t.num_inps, "topology.ul_codebooks"))
    return r;
  for (int i = 0; i < t.num_inps; ++i) {
    if (t.bs_per_inp[i] < 1)
      issue(r, "topology.bs_per_inp[" + std::to_string(i) + "]", "must be >= 1");
    if (t.dl_subcarriers[i] < 1 || t.ul_subcarriers[i] < 1)
      issue(r, "topology.subcarriers[" + std::to_string(i) + "]",
            "must be >= 1");
    if (t.dl_codebooks[i] < 1 || t.ul_codebooks[i] < 1)
      issue(r, "topology.codebooks[" + std::to_string(i) + "]", "must be >= 1");
  }

  // Derived maps must match the primary fields.
  Topology fresh = t;
  fresh.finalize();
  if (fresh.inp_of_bs != t.inp_of_bs || fresh.bs_offset != t.bs_offset ||
      fresh.bs_of_sensor != t.bs_of_sensor ||
      fresh.sensor_offset != t.sensor_offset)
    issue(r, "topology", "derived index maps are stale; call finalize()");

  // The user->ISP map must partition users into the ISPs' user sets.
  std::vector<int> seen(t.num_users(), 0);
  for (int u = 0; u < t.num_users(); ++u) {
    int v = t.user_to_isp[u];
    if (v < 0 || v >= t.num_isps)
      issue(r, "topology.user_to_isp[" + std::to_string(u) + "]",
            "ISP index out of range");
  }
  if (sized(r, t.users_of_isp, t.num_isps, "topology.users_of_isp")) {
    for (int v = 0; v < t.num_isps; ++v)
      for (int u : t.users_of_isp[v]) {
        if (u < 0 || u >= t.num_users() || t.user_to_isp[u] != v || seen[u]++)
          issue(r, "topology.users_of_isp[" + std::to_string(v) + "]",
                "user sets must be disjoint and consistent with user_to_isp");
      }
    for (int u = 0; u < t.num_users(); ++u)
      if (!seen[u])
        issue(r, "topology.users_of_isp",
              "user " + std::to_string(u) + " belongs to no ISP");
  }

  auto check_maps = [&](const std::vector<CodebookMap>& maps,
                        const std::vector<int>& counts,
                        const std::vector<int>& subcarriers,
                        const std::string& which) {
    if (!sized(r, maps, t.num_inps, "codebooks." + which)) return;
    for (int i = 0; i < t.num_inps; ++i) {
      const CodebookMap& m = maps[i];
      std::string base = "codebooks." + which + "[" + std::to_string(i) + "]";
      if (m.num_codebooks() != counts[i] ||
          m.num_subcarriers() != subcarriers[i]) {
        issue(r, base, "incidence shape does not match topology");
        continue;
      }
      for (int c = 0; c < m.num_codebooks(); ++c)
        if (m.degree(c) == 0)
          issue(r, base + ".uses[" + std::to_string(c) + "]",
                "codebook uses no subcarrier");
      if (static_cast<int>(m.split.size()) != t.bs_per_inp[i]) {
        issue(r, base + ".split", "per-BS split shape mismatch");
        continue;
      }
      for (int b = 0; b < t.bs_per_inp[i]; ++b)
        for (int c = 0; c < m.num_codebooks(); ++c) {
          double sum = 0.0;
          for (int n = 0; n < m.num_subcarriers(); ++n) {
            double lam = m.split[b][n][c];
            if (lam < 0.0 || lam > 1.0)
              issue(r, base + ".split", "split entries must lie in [0,1]");
            if (!m.uses[c][n] && lam != 0.0)
              issue(r, base + ".split",
                    "nonzero split on a subcarrier outside the codebook");
            sum += lam;
          }
          if (sum != 1.0)
            issue(r, base + ".split",
                  "splits of codebook " + std::to_string(c) + " at BS " +
                      std::to_string(b) + " must sum to exactly 1");
        }
    }
  };
  check_maps(s.dl_codebooks, t.dl_codebooks, t.dl_subcarriers, "dl");
  check_maps(s.ul_codebooks, t.ul_codebooks, t.ul_subcarriers, "ul");

  const ChannelState& ch = s.channels;
  const int B = t.total_bs(), S = t.total_sensors(), U = t.num_users();
  if (ch.noise_dl <= 0 || ch.noise_ul <= 0)
    issue(r, "channels.noise", "must be > 0");
  if (ch.path_loss_exp >= 0) issue(r, "channels.path_loss_exp", "must be < 0");
  if (sized(r, ch.dl_gain, B, "channels.dl_gain"))
    for (int b = 0; b < B; ++b) {
      int i = t.inp_of_bs[b];
      if (!sized(r, ch.dl_gain[b], U, "channels.dl_gain[b]")) continue;
      for (int u = 0; u < U; ++u) {
        if (!sized(r, ch.dl_gain[b][u], t.dl_subcarriers[i],
                   "channels.dl_gain[b][u]"))
          continue;
        for (double g : ch.dl_gain[b][u])
          if (!(g > 0) || !std::isfinite(g)) {
            issue(r, "channels.dl_gain", "gains must be finite and > 0");
            break;
          }
      }
    }
  if (sized(r, ch.ul_gain, B, "channels.ul_gain"))
    for (int b = 0; b < B; ++b) {
      int i = t.inp_of_bs[b];
      if (!sized(r, ch.ul_gain[b], S, "channels.ul_gain[b]")) continue;
      for (int sidx = 0; sidx < S; ++sidx) {
        if (!sized(r, ch.ul_gain[b][sidx], t.ul_subcarriers[i],
                   "channels.ul_gain[b][s]"))
          continue;
        for (double g : ch.ul_gain[b][sidx])
          if (!(g > 0) || !std::isfinite(g)) {
            issue(r, "channels.ul_gain", "gains must be finite and > 0");
            break;
          }
      }
    }

  const EconomicConstants& e = s.economics;
  sized(r, e.regulator_bw_price, t.num_inps, "economics.regulator_bw_price");
  sized(r, e.sensor_reservation, S, "economics.sensor_reservation");
  sized(r, e.user_reservation, U, "economics.user_reservation");
  sized(r, e.power_cap, B, "economics.power_cap");
  sized(r, e.battery_cap, S, "economics.battery_cap");
  sized(r, e.min_dl_rate, t.num_isps, "economics.min_dl_rate");
  sized(r, e.min_ul_rate, S, "economics.min_ul_rate");
  sized(r, e.weight_isp, t.num_isps, "economics.weight_isp");
  sized(r, e.weight_user, U, "economics.weight_user");
  sized(r, e.weight_inp, t.num_inps, "economics.weight_inp");
  sized(r, e.weight_sensor, S, "economics.weight_sensor");
  auto nonneg = [&](const std::vector<double>& v, const std::string& path) {
    for (double x : v)
      if (!(x >= 0) || !std::isfinite(x)) {
        issue(r, path, "entries must be finite and >= 0");
        return;
      }
  };
  nonneg(e.regulator_bw_price, "economics.regulator_bw_price");
  nonneg(e.sensor_reservation, "economics.sensor_reservation");
  nonneg(e.user_reservation, "economics.user_reservation");
  nonneg(e.min_dl_rate, "economics.min_dl_rate");
  nonneg(e.min_ul_rate, "economics.min_ul_rate");
  nonneg(e.weight_isp, "economics.weight_isp");
  nonneg(e.weight_user, "economics.weight_user");
  nonneg(e.weight_inp, "economics.weight_inp");
  nonneg(e.weight_sensor, "economics.weight_sensor");
  if (!(e.power_supplier_price >= 0))
    issue(r, "economics.power_supplier_price", "must be >= 0");
  if (!(e.sensing_quality_gain >= 0))
    issue(r, "economics.sensing_quality_gain", "must be >= 0");
  if (!(e.subcarrier_bandwidth > 0))
    issue(r, "economics.subcarrier_bandwidth", "must be > 0");
  if (!(e.price_scale > 0)) issue(r, "economics.price_scale", "must be > 0");
  if (!(e.price_cap >= 0)) issue(r, "economics.price_cap", "must be >= 0");
  for (double cap : e.power_cap)
    if (!(cap > 0)) {
      issue(r, "economics.power_cap", "must be > 0");
      break;
    }
  for (double cap : e.battery_cap)
    if (!(cap > 0)) {
      issue(r, "economics.battery_cap", "must be > 0");
      break;
    }
  if (sized(r, e.dl_band, t.num_inps, "economics.dl_band") &&
      sized(r, e.ul_band, t.num_inps, "economics.ul_band"))
    for (int i = 0; i < t.num_inps; ++i) {
      double dn = t.dl_subcarriers[i] * e.subcarrier_bandwidth;
      double up = t.ul_subcarriers[i] * e.subcarrier_bandwidth;
      double tol = 1e-12 * std::max(1.0, dn + up);
      if (std::abs(e.dl_band[i] - dn) > tol || std::abs(e.ul_band[i] - up) > tol)
        issue(r, "economics.bands[" + std::to_string(i) + "]",
              "band must equal subcarrier count times subcarrier bandwidth");
    }
  return r;
}

namespace {

struct KeyRef {
  enum Kind { kInt, kDouble } kind;
  void* target;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ScenarioConfig parse_scenario_config_text(const std::string& text) {
  ScenarioConfig c;
  // Schema: section.key -> typed pointer into the config struct.
  auto schema = [&](const std::string& name) -> KeyRef {
    static const std::string unknown = "";
    std::pair<std::string, KeyRef> table[] = {
        {"topology.num_inps", {KeyRef::kInt, &c.num_inps}},
        {"topology.bs_per_inp", {KeyRef::kInt, &c.bs_per_inp}},
        {"topology.sensors_per_bs", {KeyRef::kInt, &c.sensors_per_bs}},
        {"topology.num_isps", {KeyRef::kInt, &c.num_isps}},
        {"topology.users_per_isp", {KeyRef::kInt, &c.users_per_isp}},
        {"topology.dl_subcarriers", {KeyRef::kInt, &c.dl_subcarriers}},
        {"topology.ul_subcarriers", {KeyRef::kInt, &c.ul_subcarriers}},
        {"topology.dl_codebooks", {KeyRef::kInt, &c.dl_codebooks}},
        {"topology.ul_codebooks", {KeyRef::kInt, &c.ul_codebooks}},
        {"topology.reuse_limit", {KeyRef::kInt, &c.reuse_limit}},
        {"codebooks.dl_degree", {KeyRef::kInt, &c.dl_degree}},
        {"codebooks.ul_degree", {KeyRef::kInt, &c.ul_degree}},
        {"channels.path_loss_exp", {KeyRef::kDouble, &c.path_loss_exp}},
        {"channels.noise", {KeyRef::kDouble, &c.noise}},
        {"channels.macro_radius", {KeyRef::kDouble, &c.macro_radius}},
        {"channels.femto_radius", {KeyRef::kDouble, &c.femto_radius}},
        {"channels.reference_distance",
         {KeyRef::kDouble, &c.reference_distance}},
        {"economics.power_supplier_price",
         {KeyRef::kDouble, &c.power_supplier_price}},
        {"economics.regulator_bw_price",
         {KeyRef::kDouble, &c.regulator_bw_price}},
        {"economics.sensor_reservation",
         {KeyRef::kDouble, &c.sensor_reservation}},
        {"economics.user_reservation", {KeyRef::kDouble, &c.user_reservation}},
        {"economics.sensing_quality_gain",
         {KeyRef::kDouble, &c.sensing_quality_gain}},
        {"economics.subcarrier_bandwidth",
         {KeyRef::kDouble, &c.subcarrier_bandwidth}},
        {"economics.price_scale", {KeyRef::kDouble, &c.price_scale}},
        {"economics.price_cap", {KeyRef::kDouble, &c.price_cap}},
        {"economics.power_cap_macro", {KeyRef::kDouble, &c.power_cap_macro}},
        {"economics.power_cap_femto", {KeyRef::kDouble, &c.power_cap_femto}},
        {"economics.battery_cap", {KeyRef::kDouble, &c.battery_cap}},
        {"economics.min_dl_rate", {KeyRef::kDouble, &c.min_dl_rate}},
        {"economics.min_ul_rate", {KeyRef::kDouble, &c.min_ul_rate}},
        {"economics.weight_isp", {KeyRef::kDouble, &c.weight_isp}},
        {"economics.weight_user", {KeyRef::kDouble, &c.weight_user}},
        {"economics.weight_inp", {KeyRef::kDouble, &c.weight_inp}},
        {"economics.weight_sensor", {KeyRef::kDouble, &c.weight_sensor}},
    };
    for (auto& [key, ref] : table)
      if (key == name) return ref;
    return {KeyRef::kInt, nullptr};
  };

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string where = " (line " + std::to_string(lineno) + ")";
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: malformed section header" + where);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "topology" && section != "codebooks" &&
          section != "channels" && section != "economics")
        throw std::invalid_argument("config: unknown section '" + section +
                                    "'" + where);
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value" + where);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::invalid_argument("config: key '" + key +
                                  "' outside any section" + where);
    KeyRef ref = schema(section + "." + key);
    if (!ref.target)
      throw std::invalid_argument("config: unknown key '" + section + "." +
                                  key + "'" + where);
    try {
      size_t used = 0;
      if (ref.kind == KeyRef::kInt) {
        int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        *static_cast<int*>(ref.target) = v;
      } else {
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        *static_cast<double*>(ref.target) = v;
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad value for '" + section + "." +
                                  key + "'" + where);
    }
  }
  return c;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_config_text(buf.str());
}

}  // namespace iotmarket
