#include "hetnet/cli.hpp"

#include "hetnet/config.hpp"
#include "hetnet/montecarlo.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace hetnet {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : file_(path, std::ios::binary) {
    if (!file_) throw std::runtime_error("cannot write " + path.string());
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) file_ << (i ? "," : "") << cells[i];
    file_ << '\n';
  }

 private:
  std::ofstream file_;
};

std::string flag(bool b) { return b ? "1" : "0"; }

void write_meta(const fs::path& dir, const std::string& command, const SimConfig& config) {
  std::ofstream meta(dir / "run.meta", std::ios::binary);
  meta << "# command: " << command << '\n';
  meta << "# config_hash: " << config_hash(config) << '\n';
  meta << "# replay: hetnet " << command << " --config <this file>\n";
  meta << serialize(config);
}

void write_allocation_rows(Csv& csv, int trial, const Allocation& alloc, const ChannelGains& gains,
                           const NetworkConfig& network) {
  for (int m = 0; m < alloc.num_cells(); ++m)
    for (int i = 0; i < alloc.num_subcarriers(); ++i) {
      const auto k = alloc.user(m, i);
      if (!k) continue;
      const int u = network.global_user(m, *k);
      const double p = alloc.power(m, i);
      const double r = rate(gains(m, u, i), p, interference(alloc, gains, network, m, *k, i));
      csv.row({std::to_string(trial), to_string(alloc.band()), std::to_string(m), std::to_string(u),
               std::to_string(i), num(p), num(r)});
    }
}

int simulate(const SimConfig& config, std::ostream& out) {
  const fs::path dir = config.out;
  const ExperimentConfig exp = config.experiment();
  const Aggregate agg = run_trials(exp, config.trials, config.seed);

  Csv trials(dir / "trials.csv", {"trial", "seed", "gate", "r_min_nats", "macro_capacity_nats", "macro_rate_nats",
                                  "phantom_f1_nats", "phantom_f2_nats", "phantom_total_nats", "f1_iterations",
                                  "f2_iterations", "f1_converged", "f2_converged"});
  Csv allocs(dir / "allocations.csv", {"trial", "band", "cell", "user", "subcarrier", "power_w", "rate_nats"});
  bool infeasible = false, failed = false;
  for (const TrialResult& t : agg.trials) {
    trials.row({std::to_string(t.index), std::to_string(t.seed), f1::to_string(t.gate()), num(t.r_min),
                num(t.macro_capacity()), num(t.f1_rates.macro_total), num(t.phantom_f1()), num(t.phantom_f2()),
                num(t.phantom_total()), std::to_string(t.f1.iterations), std::to_string(t.f2.iterations),
                flag(t.f1.converged), flag(t.f2.converged)});
    const Realization r = realize(exp.preset, t.seed);
    NetworkConfig network = r.network;
    network.r_min = t.r_min;
    write_allocation_rows(allocs, t.index, t.f1.allocation, r.f1, network);
    write_allocation_rows(allocs, t.index, t.f2.allocation, r.f2, network);
    infeasible = infeasible || t.gate() == f1::GateStatus::Infeasible;
    failed = failed || (t.gate() != f1::GateStatus::Infeasible && t.failed());
  }

  Csv summary(dir / "summary.csv", {"metric", "mean", "half_width"});
  const std::pair<const char*, Estimate> rows[] = {
      {"phantom_f1_nats", agg.phantom_f1}, {"phantom_f2_nats", agg.phantom_f2},
      {"phantom_total_nats", agg.phantom_total}, {"macro_rate_nats", agg.macro_rate},
      {"macro_capacity_nats", agg.macro_capacity}};
  for (const auto& [name, e] : rows) summary.row({name, num(e.mean), num(e.half_width)});
  summary.row({"trials", std::to_string(agg.trials.size()), "0"});
  summary.row({"infeasible", std::to_string(agg.infeasible), "0"});
  summary.row({"failures", std::to_string(agg.failures), "0"});

  out << "trials " << agg.trials.size() << ", phantom capacity F1 " << agg.phantom_f1.mean << " F2 "
      << agg.phantom_f2.mean << " nats, infeasible " << agg.infeasible << ", failures " << agg.failures << '\n';
  if (infeasible) return kExitInfeasible;
  return failed ? kExitNotConverged : kExitOk;
}

int sweep(const SimConfig& config, std::ostream& out) {
  const fs::path dir = config.out;
  const ExperimentConfig exp = config.experiment();
  std::optional<std::vector<double>> grid;
  if (!config.rmin_grid.empty()) {
    grid = config.rmin_grid;
  } else if (!config.rmin_max.relative) {
    grid = default_rmin_grid(config.rmin_max.value, config.rmin_points, 1.0);
  }
  const SweepCurve curve = sweep_rmin(exp, config.trials, config.seed, grid, config.rmin_points, config.rmin_max.value);

  Csv csv(dir / "sweep.csv", {"r_min_nats", "phantom_f1_nats", "f1_half_width", "phantom_f2_nats", "f2_half_width",
                              "phantom_total_nats", "total_half_width", "infeasible", "failures", "status"});
  const int n = static_cast<int>(curve.seeds.size());
  bool failed = false;
  for (std::size_t g = 0; g < curve.grid.size(); ++g) {
    const int inf = curve.infeasible[g];
    const char* status = inf == 0 ? "ok" : inf == n ? "infeasible" : "partial";
    csv.row({num(curve.grid[g]), num(curve.f1_mean[g].mean), num(curve.f1_mean[g].half_width),
             num(curve.f2_mean[g].mean), num(curve.f2_mean[g].half_width), num(curve.total_mean[g].mean),
             num(curve.total_mean[g].half_width), std::to_string(inf), std::to_string(curve.failures[g]), status});
    failed = failed || curve.failures[g] > inf;
  }
  Csv trials(dir / "sweep_trials.csv", {"trial", "seed", "r_min_nats", "macro_capacity_nats", "phantom_f1_nats", "phantom_f2_nats"});
  for (int t = 0; t < n; ++t)
    for (std::size_t g = 0; g < curve.grid.size(); ++g)
      trials.row({std::to_string(t), std::to_string(curve.seeds[static_cast<std::size_t>(t)]), num(curve.grid[g]),
                  num(curve.macro_capacity[static_cast<std::size_t>(t)]), num(curve.f1(t, static_cast<Eigen::Index>(g))),
                  num(curve.f2(t, static_cast<Eigen::Index>(g)))});
  out << "sweep over " << curve.grid.size() << " points, " << n << " trials\n";
  return failed ? kExitNotConverged : kExitOk;
}

int trace(const SimConfig& config, std::ostream& out) {
  const fs::path dir = config.out;
  const ConvergenceTrace tr = trace_convergence(config.experiment(), config.seed);
  Csv f2(dir / "trace_f2.csv", {"iteration", "average_power_w", "objective_nats", "dual_change"});
  for (std::size_t t = 0; t < tr.f2_average_power.size(); ++t)
    f2.row({std::to_string(t + 1), num(tr.f2_average_power[t]), num(tr.f2_objective[t]), num(tr.f2_dual_change[t])});
  Csv f1(dir / "trace_f1.csv", {"iteration", "objective_nats"});
  for (std::size_t t = 0; t < tr.f1_objective.size(); ++t) f1.row({std::to_string(t + 1), num(tr.f1_objective[t])});
  out << "F2 iterations " << tr.f2_average_power.size() << " (settle change "
      << settle_change(tr.f2_average_power) << "), F1 outer iterations " << tr.f1_objective.size() << '\n';
  return tr.f2_converged && tr.f1_converged ? kExitOk : kExitNotConverged;
}

int compare(const SimConfig& config, std::ostream& out) {
  const fs::path dir = config.out;
  const std::vector<SolverComparison> cmp = compare_solvers(config.experiment(), config.trials, config.seed);
  Csv csv(dir / "compare.csv", {"trial", "seed", "nlp_capacity_nats", "subgradient_capacity_nats",
                                "nlp_outer_iterations", "nlp_evaluations", "subgradient_iterations"});
  Csv traces(dir / "compare_traces.csv", {"trial", "method", "iteration", "capacity_nats"});
  double nlp = 0.0, sub = 0.0;
  for (std::size_t t = 0; t < cmp.size(); ++t) {
    const SolverComparison& c = cmp[t];
    long evaluations = 0;
    for (long e : c.nlp_evaluations) evaluations += e;
    csv.row({std::to_string(t), std::to_string(c.seed), num(c.nlp_capacity), num(c.subgradient_capacity),
             std::to_string(c.nlp_trace.size()), std::to_string(evaluations), std::to_string(c.subgradient_trace.size())});
    for (std::size_t i = 0; i < c.nlp_trace.size(); ++i)
      traces.row({std::to_string(t), "nlp", std::to_string(i + 1), num(c.nlp_trace[i])});
    for (std::size_t i = 0; i < c.subgradient_trace.size(); ++i)
      traces.row({std::to_string(t), "subgradient", std::to_string(i + 1), num(c.subgradient_trace[i])});
    nlp += c.nlp_capacity;
    sub += c.subgradient_capacity;
  }
  out << "mean capacity nlp " << nlp / cmp.size() << ", subgradient " << sub / cmp.size() << " nats\n";
  return kExitOk;
}

int validate_suite(const SimConfig& config, std::ostream& out) {
  const fs::path dir = config.out;
  const std::vector<ValidationCase> cases = run_validation_suite(config.seed, config.validate_instances);
  Csv csv(dir / "validate.csv", {"case", "heuristic", "reference", "tolerance", "passed"});
  int failed = 0;
  for (const ValidationCase& c : cases) {
    csv.row({c.name, num(c.heuristic), num(c.reference), num(c.tolerance), flag(c.passed)});
    out << (c.passed ? "ok   " : "FAIL ") << c.name << '\n';
    failed += !c.passed;
  }
  return failed ? kExitNotConverged : kExitOk;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-tier phantom-cell resource allocation simulator"};
  app.require_subcommand(1);

  struct Flags {
    std::string config_path;
    std::optional<std::string> preset, seed, trials, rmin, rmin_max, rmin_points, out_dir;
  };
  Flags flags;
  const char* names[] = {"simulate", "sweep", "trace", "compare", "validate"};
  const char* help[] = {"Monte Carlo trials of both bands", "paired R_min sweep", "convergence traces for one seed",
                        "nlp vs subgradient on the phantom-only band", "heuristics against exhaustive oracles"};
  for (int c = 0; c < 5; ++c) {
    CLI::App* sub = app.add_subcommand(names[c], help[c]);
    sub->add_option("--config", flags.config_path, "config file (run.meta files are accepted)");
    sub->add_option("--seed", flags.seed, "master seed");
    sub->add_option("--out", flags.out_dir, "output directory");
    if (c == 4) continue;
    sub->add_option("--preset", flags.preset, "indoor or outdoor (resets scenario keys)");
    sub->add_option("--trials", flags.trials, "Monte Carlo trials");
    sub->add_option("--rmin", flags.rmin, "macro minimum rate in nats, or a multiple of capacity with an x suffix");
    if (c == 1) {
      sub->add_option("--rmin-max", flags.rmin_max, "sweep upper end (nats, or e.g. 2x)");
      sub->add_option("--rmin-points", flags.rmin_points, "sweep grid points");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  SimConfig config;
  try {
    if (!flags.config_path.empty()) config = parse_config(read_file(flags.config_path));
    if (flags.preset) set_value(config, "preset", *flags.preset);
    if (flags.seed) set_value(config, "seed", *flags.seed);
    if (flags.trials) set_value(config, "trials", *flags.trials);
    if (flags.rmin) set_value(config, "r_min", *flags.rmin);
    if (flags.rmin_max) set_value(config, "rmin_max", *flags.rmin_max);
    if (flags.rmin_points) set_value(config, "rmin_points", *flags.rmin_points);
    if (flags.out_dir) set_value(config, "out", *flags.out_dir);
    validate(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const fs::path dir = config.out;
    fs::create_directories(dir);
    write_meta(dir, command, config);
    if (command == "simulate") return simulate(config, out);
    if (command == "sweep") return sweep(config, out);
    if (command == "trace") return trace(config, out);
    if (command == "compare") return compare(config, out);
    return validate_suite(config, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int run_command(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_command(args, std::cout, std::cerr);
}

}  // namespace hetnet
