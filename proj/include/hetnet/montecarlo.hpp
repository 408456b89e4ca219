// Experiment driver: seeded trials, paired R_min sweeps, convergence traces
// and the solver comparison, plus the oracle validation suite.
#ifndef HETNET_MONTECARLO_HPP
#define HETNET_MONTECARLO_HPP

#include "hetnet/f1_allocator.hpp"
#include "hetnet/f2_allocator.hpp"
#include "hetnet/scenario.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hetnet {

struct ExperimentConfig {
  Preset preset = Preset::indoor();
  double r_min = 0.0;
  bool r_min_relative = false;   // r_min is a multiple of each trial's macro-only capacity
  f1::Options f1;
  f2::Options f2;
};

/// Per-trial seed derived from the master seed (splitmix64 of master + index).
std::uint64_t trial_seed(std::uint64_t master_seed, int index);

/// Number of worker threads: HETNET_THREADS if set, else the hardware count.
int worker_count();

/// Runs fn(0..n-1) over worker_count() threads. Callers store results by index.
void parallel_for(int n, const std::function<void(int)>& fn);

struct Realization {
  Deployment deployment;
  NetworkConfig network;
  ChannelGains f1;
  ChannelGains f2;
};

/// Deployment, then F1 gains, then F2 gains from one seeded stream.
Realization realize(const Preset& preset, std::uint64_t seed);

struct TrialResult {
  int index = 0;
  std::uint64_t seed = 0;
  double r_min = 0.0;        // absolute target used by this trial
  f1::Result f1;
  f2::Result f2;
  RateReport f1_rates;
  RateReport f2_rates;
  double f1_seconds = 0.0;
  double f2_seconds = 0.0;

  f1::GateStatus gate() const { return f1.gate.status; }
  double macro_capacity() const { return f1.gate.macro_capacity; }
  double phantom_f1() const { return f1_rates.phantom_total; }
  double phantom_f2() const { return f2_rates.phantom_total; }
  double phantom_total() const { return phantom_f1() + phantom_f2(); }
  bool failed() const { return !f1.converged || !f2.converged; }
};

struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;   // 95% normal approximation
};

Estimate estimate(std::span<const double> samples);

struct Aggregate {
  std::vector<TrialResult> trials;
  Estimate phantom_f1, phantom_f2, phantom_total, macro_rate, macro_capacity;
  int infeasible = 0;
  int failures = 0;
};

TrialResult run_trial(const ExperimentConfig& config, const Realization& realization, int index);
Aggregate aggregate(std::vector<TrialResult> trials);
Aggregate run_trials(const ExperimentConfig& config, int n, std::uint64_t master_seed);
Aggregate run_trials(const ExperimentConfig& config, std::span<const std::uint64_t> seeds);

struct SweepCurve {
  std::vector<double> grid;             // absolute R_min, nats
  std::vector<std::uint64_t> seeds;
  std::vector<double> macro_capacity;   // per trial
  Eigen::MatrixXd f1;                   // trials x grid, phantom capacity (0 when infeasible)
  Eigen::MatrixXd f2;
  std::vector<Estimate> f1_mean, f2_mean, total_mean;
  std::vector<int> infeasible;          // per grid point
  std::vector<int> failures;
};

/// `points` evenly spaced values from 0 to max_factor * mean_capacity.
std::vector<double> default_rmin_grid(double mean_capacity, int points = 12, double max_factor = 1.1);

/// Paired sweep: every grid point reuses the same trial realizations. With no
/// explicit grid, the default grid spans the mean macro-only capacity.
SweepCurve sweep_rmin(const ExperimentConfig& config, int n, std::uint64_t master_seed,
                      std::optional<std::vector<double>> grid = std::nullopt, int points = 12,
                      double max_factor = 1.1);

struct ConvergenceTrace {
  std::vector<double> f2_average_power;   // watts per phantom user
  std::vector<double> f2_objective;
  std::vector<double> f2_dual_change;
  std::vector<double> f1_objective;       // per outer iteration
  bool f2_converged = false;
  bool f1_converged = false;
  double mask = 0.0;                      // phantom per-subcarrier mask on F2
  double max_user_power = 0.0;            // largest per-subcarrier power any user held
};

ConvergenceTrace trace_convergence(const ExperimentConfig& config, std::uint64_t seed);

/// Largest relative change of the series over its last `window` steps.
double settle_change(std::span<const double> series, int window = 10);

/// Both solvers on the phantom-only band of one realization: alternating
/// nlp power solves with best-rate reassignment, and the dual subgradient
/// method.
struct SolverComparison {
  std::uint64_t seed = 0;
  std::vector<double> nlp_trace;           // capacity per outer iteration
  std::vector<long> nlp_evaluations;       // objective evaluations per outer iteration
  std::vector<double> subgradient_trace;   // capacity per iteration
  double nlp_capacity = 0.0;
  double subgradient_capacity = 0.0;
  double nlp_seconds = 0.0;
  double subgradient_seconds = 0.0;
};

SolverComparison compare_solvers(const ExperimentConfig& config, std::uint64_t seed);
std::vector<SolverComparison> compare_solvers(const ExperimentConfig& config, int n, std::uint64_t master_seed);

/// A reduced-size draw from the scenario model for oracle comparisons.
struct SmallInstance {
  NetworkConfig network;
  ChannelGains gains;
};

SmallInstance small_instance(Environment env, Band band, int phantom_cells, int macro_users, int users_per_phantom,
                             int subcarriers, std::uint64_t seed);

struct ValidationCase {
  std::string name;
  double heuristic = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;   // allowed shortfall of heuristic below reference
  bool passed = false;
};

/// Heuristics against exhaustive or grid oracles on built-in small instances.
std::vector<ValidationCase> run_validation_suite(std::uint64_t seed, int instances_per_band = 5);

}  // namespace hetnet

#endif  // HETNET_MONTECARLO_HPP
