#include "iotmarket/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace iotmarket {

namespace {

void append_row(std::string& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const std::string& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
}

std::string idx(int i) { return std::to_string(i); }

}  // namespace

std::string approach_name(Approach a) {
  switch (a) {
    case Approach::weight_one:
      return "weight-one";
    case Approach::max_min:
      return "max-min";
    default:
      return "conventional";
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string run_report_csv(const RunReport& rep) {
  std::string out =
      "iteration,objective,phi_isp,phi_inp,phi_sens,phi_user,jain\n";
  for (size_t k = 0; k < rep.trace.size(); ++k) {
    const PlayerRevenues& r = rep.revenue_trace[k];
    std::string jain;
    const double sq = r.isp_total * r.isp_total + r.inp_total * r.inp_total +
                      r.sensor_total * r.sensor_total;
    if (sq > 0.0)
      jain = format_number(
          jain_index(r.isp_total, r.inp_total, r.sensor_total));
    append_row(out, {std::to_string(k), format_number(rep.trace[k]),
                     format_number(r.isp_total), format_number(r.inp_total),
                     format_number(r.sensor_total),
                     format_number(r.user_total), jain});
  }
  return out;
}

std::string allocation_csv(const Scenario& s, const Allocation& a) {
  const AllocShape sh = AllocShape::of(s);
  const Topology& t = s.topology;
  const int S = t.total_sensors();
  std::string out = "var,i,j,k,value\n";
  for (int b = 0; b < sh.num_bs; ++b)
    for (int u = 0; u < sh.num_users; ++u)
      for (int c = 0; c < sh.dl_cb[b]; ++c) {
        const int f = sh.dl(b, u, c);
        append_row(out, {"dl_assign", idx(b), idx(u), idx(c),
                         format_number(a.dl_assign[f])});
        append_row(out, {"dl_power", idx(b), idx(u), idx(c),
                         format_number(a.dl_power[f])});
      }
  for (int sn = 0; sn < sh.num_sensors; ++sn)
    for (int c = 0; c < sh.ul_cb[sn]; ++c) {
      const int f = sh.ul(sn, c);
      append_row(out, {"ul_assign", idx(sn), idx(c), "",
                       format_number(a.ul_assign[f])});
      append_row(out, {"ul_power", idx(sn), idx(c), "",
                       format_number(a.ul_power[f])});
    }
  for (int b = 0; b < t.total_bs(); ++b)
    append_row(out, {"price_bs_power", idx(b), "", "",
                     format_number(a.prices.bs_power[b])});
  for (int i = 0; i < t.num_inps; ++i)
    append_row(out, {"price_bandwidth", idx(i), "", "",
                     format_number(a.prices.bandwidth[i])});
  for (int v = 0; v < t.num_isps; ++v)
    for (int sn = 0; sn < S; ++sn)
      append_row(out, {"price_sensor_data", idx(v), idx(sn), "",
                       format_number(a.prices.sensor_data[v * S + sn])});
  for (int sn = 0; sn < S; ++sn)
    append_row(out, {"price_uplink_rate", idx(sn), "", "",
                     format_number(a.prices.uplink_rate[sn])});
  for (int v = 0; v < t.num_isps; ++v)
    append_row(out, {"price_downlink_rate", idx(v), "", "",
                     format_number(a.prices.downlink_rate[v])});
  for (int u = 0; u < t.num_users(); ++u)
    append_row(out, {"price_user_reserv", idx(u), "", "",
                     format_number(a.prices.user_reserv[u])});
  for (int sn = 0; sn < S; ++sn)
    for (int u = 0; u < t.num_users(); ++u)
      append_row(out, {"alpha", idx(sn), idx(u), "",
                       format_number(a.alpha[sn * t.num_users() + u])});
  return out;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out =
      "approach,l_max,phi_isp,phi_inp,phi_sens,phi_user,sum,jain,iters,ms,"
      "status\n";
  for (const SweepCell& c : r.cells)
    append_row(out,
               {approach_name(c.approach), format_number(c.l_max),
                format_number(c.phi_isp), format_number(c.phi_inp),
                format_number(c.phi_sens), format_number(c.phi_user),
                format_number(c.sum), format_number(c.jain),
                std::to_string(c.iterations), "0",
                c.failed ? std::string("failed") : std::string("ok")});
  return out;
}

std::string complexity_csv(const Topology& t) {
  const Approach approaches[] = {Approach::weight_one, Approach::max_min,
                                 Approach::conventional};
  const struct {
    Block block;
    const char* name;
  } blocks[] = {{Block::codebook, "codebook"},
                {Block::power, "power"},
                {Block::alpha, "data_share"},
                {Block::price, "price"}};
  std::string out = "approach,block,delta,ipm_iters\n";
  for (Approach a : approaches)
    for (const auto& b : blocks) {
      const long long d = complexity_delta(a, b.block, t);
      append_row(out, {approach_name(a), b.name, std::to_string(d),
                       format_number(ipm_iteration_estimate(d))});
    }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace iotmarket
