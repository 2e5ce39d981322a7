#include "iotmarket/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "iotmarket/csv.hpp"
#include "iotmarket/evaluation.hpp"

namespace iotmarket {

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInfeasible = 2;
constexpr int kSolverFailure = 3;

const std::map<std::string, Approach> kApproachNames = {
    {"weight-one", Approach::weight_one},
    {"max-min", Approach::max_min},
    {"conventional", Approach::conventional}};

const std::map<std::string, CentralScalarization> kCentralNames = {
    {"max-min", CentralScalarization::max_min},
    {"weight-one", CentralScalarization::weight_one}};

struct CommonArgs {
  std::string scenario_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int max_outer_iters = 50;
  double tol = 1e-4;
  std::vector<double> weights;  // isp, inp, sensor, user class weights
  Approach approach = Approach::weight_one;
  bool approach_set = false;
  CentralScalarization central = CentralScalarization::max_min;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario_path,
                  "Scenario config file (omit for the built-in default)")
      ->envname("IOTMARKET_SCENARIO");
  cmd->add_option("--seed", args.seed, "Scenario generator seed")
      ->envname("IOTMARKET_SEED");
  cmd->add_option("--out", args.out_dir, "Output directory for CSV files")
      ->envname("IOTMARKET_OUT");
  cmd->add_option("--max-outer-iters", args.max_outer_iters,
                  "Outer iteration budget")
      ->envname("IOTMARKET_MAX_OUTER_ITERS");
  cmd->add_option("--tol", args.tol, "Relative convergence tolerance")
      ->envname("IOTMARKET_TOL");
  cmd->add_option("--weights", args.weights,
                  "Class weights isp,inp,sensor,user for the weighted sum")
      ->delimiter(',')
      ->expected(4)
      ->envname("IOTMARKET_WEIGHTS");
  cmd->add_option("--central-scalarization", args.central,
                  "Conventional phase-2 objective")
      ->transform(CLI::CheckedTransformer(kCentralNames))
      ->envname("IOTMARKET_CENTRAL_SCALARIZATION");
}

Scenario load_scenario(const CommonArgs& args) {
  ScenarioConfig cfg = args.scenario_path.empty()
                           ? default_scenario_config()
                           : load_scenario_config(args.scenario_path);
  return generate_scenario(cfg, args.seed);
}

RunOptions make_options(const Scenario& s, const CommonArgs& args) {
  RunOptions opts;
  opts.approach = args.approach;
  opts.max_outer_iters = args.max_outer_iters;
  opts.rel_tol = args.tol;
  opts.seed = args.seed;
  opts.central = args.central;
  if (!args.weights.empty()) {
    const Topology& t = s.topology;
    opts.weights.isp.assign(t.num_isps, args.weights[0]);
    opts.weights.inp.assign(t.num_inps, args.weights[1]);
    opts.weights.sensor.assign(t.total_sensors(), args.weights[2]);
    opts.weights.user.assign(t.num_users(), args.weights[3]);
  }
  return opts;
}

std::string join_path(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void print_report_line(const char* tag, const RunReport& rep) {
  const PlayerRevenues& r = rep.revenues;
  std::printf(
      "%s: %s after %d iterations, isp=%.4g inp=%.4g sens=%.4g user=%.4g "
      "sum=%.4g (%.0f ms)\n",
      tag, rep.converged ? "converged" : "stopped at the iteration budget",
      rep.iterations, r.isp_total, r.inp_total, r.sensor_total, r.user_total,
      r.sum_totals(), rep.wall_ms);
}

int cmd_run(const CommonArgs& args) {
  const Scenario s = load_scenario(args);
  const RunReport rep = run_approach(s, make_options(s, args));
  write_file(join_path(args.out_dir, "run_report.csv"), run_report_csv(rep));
  write_file(join_path(args.out_dir, "allocation.csv"),
             allocation_csv(s, rep.final_alloc));
  print_report_line(approach_name(args.approach).c_str(), rep);
  for (const std::string& w : rep.warnings)
    std::printf("  note: %s\n", w.c_str());
  if (rep.infeasible) {
    std::fprintf(stderr, "infeasible: %s\n", rep.message.c_str());
    return kInfeasible;
  }
  return rep.converged ? kOk : kSolverFailure;
}

bool parse_grid(const std::string& spec, std::vector<double>& grid) {
  // lmax:<start>:<stop>:<steps>
  if (spec.rfind("lmax:", 0) != 0) return false;
  double start = 0.0, stop = 0.0;
  int steps = 0;
  char trail = 0;
  if (std::sscanf(spec.c_str() + 5, "%lf:%lf:%d%c", &start, &stop, &steps,
                  &trail) != 3)
    return false;
  if (steps < 1 || start < 0.0 || (steps > 1 && stop <= start)) return false;
  grid.clear();
  for (int k = 0; k < steps; ++k)
    grid.push_back(steps == 1 ? start
                              : start + (stop - start) * k / (steps - 1));
  return true;
}

int cmd_sweep(const CommonArgs& args, const std::string& grid_spec) {
  std::vector<double> grid;
  if (!parse_grid(grid_spec, grid)) {
    std::fprintf(stderr,
                 "bad --sweep spec '%s'; expected lmax:<start>:<stop>:<steps>"
                 " with steps >= 1 and stop > start\n",
                 grid_spec.c_str());
    return kUsage;
  }
  const Scenario s = load_scenario(args);
  std::vector<Approach> approaches;
  if (args.approach_set)
    approaches.push_back(args.approach);
  else
    approaches = {Approach::weight_one, Approach::max_min,
                  Approach::conventional};

  const SweepResult result =
      sweep_lmax(s, grid, approaches, make_options(s, args));
  write_file(join_path(args.out_dir, "sweep.csv"), sweep_csv(result));
  int succeeded = 0;
  for (const SweepCell& c : result.cells) {
    if (c.failed) {
      std::printf("%-12s l_max=%-8.4g failed: %s\n",
                  approach_name(c.approach).c_str(), c.l_max,
                  c.error.c_str());
    } else {
      std::printf("%-12s l_max=%-8.4g sum=%-10.4g jain=%.3f iters=%d "
                  "(%.0f ms)\n",
                  approach_name(c.approach).c_str(), c.l_max, c.sum, c.jain,
                  c.iterations, c.wall_ms);
      ++succeeded;
    }
  }
  return succeeded > 0 ? kOk : kSolverFailure;
}

int cmd_complexity(const CommonArgs& args) {
  const Scenario s = load_scenario(args);
  const Topology& t = s.topology;
  write_file(join_path(args.out_dir, "complexity.csv"), complexity_csv(t));

  std::printf("%-12s %-10s %12s %10s\n", "approach", "block", "delta",
              "ipm_iters");
  const Approach approaches[] = {Approach::weight_one, Approach::max_min,
                                 Approach::conventional};
  const struct {
    Block block;
    const char* name;
  } blocks[] = {{Block::codebook, "codebook"},
                {Block::power, "power"},
                {Block::alpha, "data_share"},
                {Block::price, "price"}};
  for (Approach a : approaches)
    for (const auto& b : blocks) {
      const long long d = complexity_delta(a, b.block, t);
      std::printf("%-12s %-10s %12lld %10.2f\n", approach_name(a).c_str(),
                  b.name, d, ipm_iteration_estimate(d));
    }

  const EmittedRowCounts rows = emitted_row_counts(s);
  std::printf("emitted rows: power=%d (formula %lld), codebook=%d "
              "(combinatorial formula %lld), data_share=%d (formula %lld)\n",
              rows.power, power_constraint_count(t), rows.assignment,
              assignment_constraint_count(t), rows.data_share,
              share_constraint_count(t));
  return kOk;
}

int cmd_validate(const CommonArgs& args) {
  const Scenario s = load_scenario(args);
  const ValidationReport report = validate_scenario(s);
  if (report.ok()) {
    std::printf("scenario ok: %d BSs, %d sensors, %d users\n",
                s.topology.total_bs(), s.topology.total_sensors(),
                s.topology.num_users());
    return kOk;
  }
  for (const ValidationIssue& issue : report.issues)
    std::fprintf(stderr, "%s: %s\n", issue.path.c_str(),
                 issue.message.c_str());
  return kInfeasible;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Joint pricing and radio resource allocation for an IoT "
               "market of infrastructure, service, and sensing providers"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string grid_spec;

  CLI::App* run = app.add_subcommand("run", "Run one approach to a final "
                                            "allocation and report");
  add_common_flags(run, args);
  run->add_option("--approach", args.approach,
                  "Market design: weight-one, max-min, or conventional")
      ->transform(CLI::CheckedTransformer(kApproachNames))
      ->envname("IOTMARKET_APPROACH")
      ->required();

  CLI::App* sweep =
      app.add_subcommand("sweep", "Rerun across a price-cap grid");
  add_common_flags(sweep, args);
  CLI::Option* sweep_approach =
      sweep->add_option("--approach", args.approach,
                        "Restrict the sweep to one approach")
          ->transform(CLI::CheckedTransformer(kApproachNames))
          ->envname("IOTMARKET_APPROACH");
  sweep->add_option("--sweep", grid_spec, "Grid spec lmax:<start>:<stop>:<steps>")
      ->envname("IOTMARKET_SWEEP")
      ->required();

  CLI::App* complexity = app.add_subcommand(
      "complexity", "Constraint counts per approach and variable block");
  add_common_flags(complexity, args);

  CLI::App* validate =
      app.add_subcommand("validate", "Audit a scenario's invariants");
  add_common_flags(validate, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  args.approach_set = sweep_approach->count() > 0;

  try {
    if (run->parsed()) return cmd_run(args);
    if (sweep->parsed()) return cmd_sweep(args, grid_spec);
    if (complexity->parsed()) return cmd_complexity(args);
    return cmd_validate(args);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSolverFailure;
  }
}

}  // namespace iotmarket
