#include "iotmarket/evaluation.hpp"

#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>

namespace iotmarket {

double jain_index(double phi_isp, double phi_inp, double phi_sens) {
  const double sum = phi_isp + phi_inp + phi_sens;
  const double sq =
      phi_isp * phi_isp + phi_inp * phi_inp + phi_sens * phi_sens;
  if (sq == 0.0)
    throw std::invalid_argument("jain_index: all three utilities are zero");
  return sum * sum / (3.0 * sq);
}

long long assignment_constraint_count(const Topology& t) {
  const long long U = t.num_users();
  const long long S = t.total_sensors();
  long long sum_c = 0, sum_b = 0, sum_n = 0, sum_m = 0;
  for (int i = 0; i < t.num_inps; ++i) {
    sum_c += t.dl_codebooks[i];
    sum_b += t.bs_per_inp[i];
    sum_n += t.dl_subcarriers[i];
    sum_m += t.ul_subcarriers[i];
  }
  // The primed factors sum the complement over ordered provider pairs, so
  // each provider's count appears I - 1 times.
  const long long sum_c_other = (t.num_inps - 1) * sum_c;
  const long long sum_b_other = (t.num_inps - 1) * sum_b;
  long long pairwise = 0;
  for (int i = 0; i < t.num_inps; ++i) {
    const long long c = t.dl_codebooks[i];
    const long long b = t.bs_per_inp[i];
    pairwise += c * c * b * (b - 1);
  }
  return U * sum_c * sum_c_other * sum_b * sum_b_other + U * pairwise +
         sum_n + sum_m + sum_b + 2 * S + U;
}

long long power_constraint_count(const Topology& t) {
  long long sum_b = 0;
  for (int b : t.bs_per_inp) sum_b += b;
  return sum_b + 2LL * t.total_sensors() + t.num_users();
}

long long share_constraint_count(const Topology& t) {
  return static_cast<long long>(t.total_sensors()) *
         (2LL * t.num_isps + t.num_users() + 2);
}

long long complexity_delta(Approach approach, Block block, const Topology& t) {
  long long base = 0;
  switch (block) {
    case Block::codebook:
      base = assignment_constraint_count(t);
      break;
    case Block::power:
      base = power_constraint_count(t);
      break;
    case Block::alpha:
      base = share_constraint_count(t);
      break;
    case Block::price:
      base = 0;
      break;
  }
  switch (approach) {
    case Approach::weight_one:
      return base;
    case Approach::max_min:
      return base + (block == Block::alpha ? 2 : 3);
    default: {
      const long long floors = t.num_inps + t.num_isps + 9;
      return base + (block == Block::alpha ? t.num_isps + 7 : floors);
    }
  }
}

double ipm_iteration_estimate(long long delta, double t0, double stop,
                              double accuracy_update) {
  if (delta <= 0) return 0.0;
  return std::log(static_cast<double>(delta) / (t0 * stop)) /
         std::log(accuracy_update);
}

EmittedRowCounts emitted_row_counts(const Scenario& s) {
  const LinkContext ctx = LinkContext::build(s);
  const Allocation a = initial_allocation(s);
  ScalarizedObjective form;
  form.weights = RevenueWeights::from_scenario(s);
  EmittedRowCounts out;
  out.assignment =
      build_block_subproblem(s, ctx, a, form, Block::codebook).row_count();
  out.power =
      build_block_subproblem(s, ctx, a, form, Block::power).row_count();
  out.data_share =
      build_block_subproblem(s, ctx, a, form, Block::alpha).row_count();
  return out;
}

SweepResult sweep_lmax(const Scenario& base, const std::vector<double>& grid,
                       const std::vector<Approach>& approaches,
                       const RunOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("sweep_lmax: empty grid");
  for (size_t k = 1; k < grid.size(); ++k)
    if (grid[k] <= grid[k - 1])
      throw std::invalid_argument("sweep_lmax: grid must ascend");

  SweepResult out;
  out.grid = grid;
  for (Approach ap : approaches) {
    for (double cap : grid) {
      SweepCell cell;
      cell.approach = ap;
      cell.l_max = cap;
      Scenario s = base;
      s.economics.price_cap = cap;
      RunOptions cell_opts = opts;
      cell_opts.approach = ap;
      try {
        const RunReport rep = run_approach(s, cell_opts);
        cell.phi_isp = rep.revenues.isp_total;
        cell.phi_inp = rep.revenues.inp_total;
        cell.phi_sens = rep.revenues.sensor_total;
        cell.phi_user = rep.revenues.user_total;
        cell.sum = rep.revenues.sum_totals();
        cell.iterations = rep.iterations;
        cell.wall_ms = rep.wall_ms;
        cell.converged = rep.converged;
        if (rep.infeasible) {
          cell.failed = true;
          cell.error = rep.message.empty() ? "infeasible" : rep.message;
        } else {
          cell.jain = jain_index(cell.phi_isp, cell.phi_inp, cell.phi_sens);
        }
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
      }
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

}  // namespace iotmarket
