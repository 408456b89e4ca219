#include "hetnet/montecarlo.hpp"

#include "hetnet/oracle.hpp"
#include "hetnet/waterfill.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace hetnet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kGainStream = 0x6A09E667F3BCC909ULL;

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, int index) {
  return splitmix64(master_seed + static_cast<std::uint64_t>(index));
}

int worker_count() {
  if (const char* env = std::getenv("HETNET_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

Realization realize(const Preset& preset, std::uint64_t seed) {
  Realization r;
  r.deployment = generate(preset, seed);
  r.network = preset.network();
  Rng rng(seed ^ kGainStream);
  r.f1 = realize_gains(r.deployment, Band::F1, rng);
  r.f2 = realize_gains(r.deployment, Band::F2, rng);
  return r;
}

Estimate estimate(std::span<const double> samples) {
  Estimate e;
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  // Welford: a constant sample has a mean equal to that constant and ss = 0.
  double ss = 0.0, k = 0.0;
  for (double s : samples) {
    k += 1.0;
    const double delta = s - e.mean;
    e.mean += delta / k;
    ss += delta * (s - e.mean);
  }
  if (samples.size() < 2) return e;
  e.half_width = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return e;
}

TrialResult run_trial(const ExperimentConfig& config, const Realization& realization, int index) {
  TrialResult t;
  t.index = index;
  t.seed = realization.deployment.seed;
  NetworkConfig network = realization.network;
  if (config.r_min_relative) {
    network.r_min = 0.0;
    network.r_min = config.r_min * f1::feasibility_gate(realization.f1, network).macro_capacity;
  } else {
    network.r_min = config.r_min;
  }
  t.r_min = network.r_min;

  f1::Options f1_options = config.f1;
  f1_options.solver.seed = splitmix64(t.seed);
  auto start = Clock::now();
  t.f1 = f1::run(realization.f1, network, f1_options);
  t.f1_seconds = seconds_since(start);
  t.f1_rates = throughput(t.f1.allocation, realization.f1, network);

  start = Clock::now();
  t.f2 = f2::run(realization.f2, network, config.f2);
  t.f2_seconds = seconds_since(start);
  t.f2_rates = throughput(t.f2.allocation, realization.f2, network);
  return t;
}

Aggregate aggregate(std::vector<TrialResult> trials) {
  Aggregate a;
  std::vector<double> f1v, f2v, total, macro, capacity;
  for (const TrialResult& t : trials) {
    f1v.push_back(t.phantom_f1());
    f2v.push_back(t.phantom_f2());
    total.push_back(t.phantom_total());
    macro.push_back(t.f1_rates.macro_total);
    capacity.push_back(t.macro_capacity());
    if (t.gate() == f1::GateStatus::Infeasible) ++a.infeasible;
    if (t.failed()) ++a.failures;
  }
  a.phantom_f1 = estimate(f1v);
  a.phantom_f2 = estimate(f2v);
  a.phantom_total = estimate(total);
  a.macro_rate = estimate(macro);
  a.macro_capacity = estimate(capacity);
  a.trials = std::move(trials);
  return a;
}

Aggregate run_trials(const ExperimentConfig& config, std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw std::invalid_argument("run_trials: need at least one trial");
  std::vector<TrialResult> trials(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), [&](int i) {
    trials[static_cast<std::size_t>(i)] = run_trial(config, realize(config.preset, seeds[static_cast<std::size_t>(i)]), i);
  });
  return aggregate(std::move(trials));
}

Aggregate run_trials(const ExperimentConfig& config, int n, std::uint64_t master_seed) {
  if (n < 1) throw std::invalid_argument("run_trials: need at least one trial");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < n; ++i) seeds.push_back(trial_seed(master_seed, i));
  return run_trials(config, seeds);
}

std::vector<double> default_rmin_grid(double mean_capacity, int points, double max_factor) {
  if (points < 2) throw std::invalid_argument("default_rmin_grid: need at least two points");
  std::vector<double> grid;
  for (int g = 0; g < points; ++g) grid.push_back(max_factor * mean_capacity * g / (points - 1));
  return grid;
}

SweepCurve sweep_rmin(const ExperimentConfig& config, int n, std::uint64_t master_seed,
                      std::optional<std::vector<double>> grid, int points, double max_factor) {
  if (n < 1) throw std::invalid_argument("sweep_rmin: need at least one trial");
  SweepCurve curve;
  std::vector<Realization> realizations(static_cast<std::size_t>(n));
  curve.macro_capacity.assign(static_cast<std::size_t>(n), 0.0);
  for (int t = 0; t < n; ++t) curve.seeds.push_back(trial_seed(master_seed, t));
  parallel_for(n, [&](int t) {
    auto& r = realizations[static_cast<std::size_t>(t)];
    r = realize(config.preset, curve.seeds[static_cast<std::size_t>(t)]);
    curve.macro_capacity[static_cast<std::size_t>(t)] = f1::feasibility_gate(r.f1, r.network).macro_capacity;
  });
  if (grid) {
    curve.grid = *grid;
  } else {
    double mean = 0.0;
    for (double c : curve.macro_capacity) mean += c;
    curve.grid = default_rmin_grid(mean / n, points, max_factor);
  }
  for (std::size_t g = 1; g < curve.grid.size(); ++g)
    if (!(curve.grid[g] > curve.grid[g - 1])) throw std::invalid_argument("sweep_rmin: grid must be strictly increasing");
  if (curve.grid.empty() || curve.grid.front() < 0.0) throw std::invalid_argument("sweep_rmin: grid must be non-empty and >= 0");

  const int points_used = static_cast<int>(curve.grid.size());
  curve.f1 = Eigen::MatrixXd::Zero(n, points_used);
  curve.f2 = Eigen::MatrixXd::Zero(n, points_used);
  Eigen::ArrayXXi infeasible = Eigen::ArrayXXi::Zero(n, points_used);
  Eigen::ArrayXXi failed = Eigen::ArrayXXi::Zero(n, points_used);
  parallel_for(n, [&](int t) {
    for (int g = 0; g < points_used; ++g) {
      ExperimentConfig point = config;
      point.r_min = curve.grid[static_cast<std::size_t>(g)];
      point.r_min_relative = false;
      const TrialResult r = run_trial(point, realizations[static_cast<std::size_t>(t)], t);
      curve.f1(t, g) = r.phantom_f1();
      curve.f2(t, g) = r.phantom_f2();
      infeasible(t, g) = r.gate() == f1::GateStatus::Infeasible;
      failed(t, g) = r.failed();
    }
  });
  for (int g = 0; g < points_used; ++g) {
    const Eigen::VectorXd f1c = curve.f1.col(g), f2c = curve.f2.col(g);
    const Eigen::VectorXd total = f1c + f2c;
    curve.f1_mean.push_back(estimate({f1c.data(), static_cast<std::size_t>(n)}));
    curve.f2_mean.push_back(estimate({f2c.data(), static_cast<std::size_t>(n)}));
    curve.total_mean.push_back(estimate({total.data(), static_cast<std::size_t>(n)}));
    curve.infeasible.push_back(infeasible.col(g).sum());
    curve.failures.push_back(failed.col(g).sum());
  }
  return curve;
}

ConvergenceTrace trace_convergence(const ExperimentConfig& config, std::uint64_t seed) {
  const Realization r = realize(config.preset, seed);
  ConvergenceTrace trace;
  const f2::Result f2r = f2::run(r.f2, r.network, config.f2, true);
  trace.f2_average_power = f2r.average_power;
  trace.f2_objective = f2r.objective;
  trace.f2_dual_change = f2r.dual_change;
  trace.f2_converged = f2r.converged;
  trace.mask = r.network.mask_f2.tail(r.network.phantom_cells).maxCoeff();
  for (const Allocation& a : f2r.iterates)
    trace.max_user_power = std::max(trace.max_user_power, a.powers().maxCoeff());

  const TrialResult t = run_trial(config, r, 0);
  trace.f1_objective = t.f1.trace;
  trace.f1_converged = t.f1.converged;
  return trace;
}

double settle_change(std::span<const double> series, int window) {
  double change = 0.0;
  const std::size_t n = series.size();
  const std::size_t first = n > static_cast<std::size_t>(window) ? n - static_cast<std::size_t>(window) : 1;
  for (std::size_t t = first; t < n; ++t) {
    const double scale = std::max(std::abs(series[t - 1]), 1e-300);
    change = std::max(change, std::abs(series[t] - series[t - 1]) / scale);
  }
  return change;
}

SolverComparison compare_solvers(const ExperimentConfig& config, std::uint64_t seed) {
  const Realization r = realize(config.preset, seed);
  SolverComparison c;
  c.seed = seed;

  f1::Options nlp_options = config.f1;
  nlp_options.solver.seed = splitmix64(seed);
  const Allocation empty(Band::F2, r.network.num_cells(), r.network.subcarriers_f2);
  auto start = Clock::now();
  const f1::Result nlp = f1::optimize(r.f2, r.network, f1::initial_assignment(r.f2, r.network, empty), nlp_options);
  c.nlp_seconds = seconds_since(start);
  c.nlp_trace = nlp.trace;
  c.nlp_evaluations = nlp.evaluations;
  c.nlp_capacity = throughput(nlp.allocation, r.f2, r.network).phantom_total;

  start = Clock::now();
  const f2::Result sub = f2::run(r.f2, r.network, config.f2);
  c.subgradient_seconds = seconds_since(start);
  c.subgradient_trace = sub.objective;
  c.subgradient_capacity = throughput(sub.allocation, r.f2, r.network).phantom_total;
  return c;
}

std::vector<SolverComparison> compare_solvers(const ExperimentConfig& config, int n, std::uint64_t master_seed) {
  if (n < 1) throw std::invalid_argument("compare_solvers: need at least one trial");
  std::vector<SolverComparison> out(static_cast<std::size_t>(n));
  parallel_for(n, [&](int t) { out[static_cast<std::size_t>(t)] = compare_solvers(config, trial_seed(master_seed, t)); });
  return out;
}

SmallInstance small_instance(Environment env, Band band, int phantom_cells, int macro_users, int users_per_phantom,
                             int subcarriers, std::uint64_t seed) {
  Preset preset = Preset::of(env);
  preset.phantom_cells = phantom_cells;
  preset.macro_users = macro_users;
  preset.users_per_phantom = users_per_phantom;
  preset.subcarriers_f1 = subcarriers;
  preset.subcarriers_f2 = subcarriers;
  const Deployment d = generate(preset, seed);
  Rng rng(seed ^ kGainStream);
  return {preset.network(), realize_gains(d, band, rng)};
}

namespace {

ValidationCase make_case(std::string name, double heuristic, double reference, double tolerance) {
  return {std::move(name), heuristic, reference, tolerance, heuristic >= reference - tolerance};
}

}  // namespace

std::vector<ValidationCase> run_validation_suite(std::uint64_t seed, int instances_per_band) {
  std::vector<ValidationCase> cases;

  {
    // Two-carrier water-filling against a 10^5-point line search.
    const Eigen::Vector2d h(1.0, 0.5);
    const auto wf = capped_waterfill(h, 1.0, 2.0, Eigen::Vector2d(2.0, 2.0));
    const double got = std::log1p(wf.powers(0)) + std::log1p(0.5 * wf.powers(1));
    double best = -1.0;
    for (int s = 0; s <= 100000; ++s) {
      const double p1 = 2.0 * s / 100000.0;
      best = std::max(best, std::log1p(p1) + std::log1p(0.5 * (2.0 - p1)));
    }
    cases.push_back(make_case("waterfill_two_carrier", got, best, 1e-4));
  }

  {
    // One phantom carrier whose power is capped by the macro target.
    NetworkConfig net;
    net.phantom_cells = 1;
    net.users = {1, 1};
    net.budget = Eigen::Vector2d(1.0, 1.0);
    net.mask_f1 = net.budget;
    net.mask_f2 = net.budget;
    net.noise_power = 0.1;
    net.r_min = std::log1p(1.0 / (0.1 + 0.5 * 0.4));
    ChannelGains gains(Band::F1, 2, 2, 1);
    gains.at(0, 0, 0) = 1.0;
    gains.at(1, 0, 0) = 0.5;
    gains.at(0, 1, 0) = 0.2;
    gains.at(1, 1, 0) = 1.0;
    Allocation alloc(Band::F1, 2, 1);
    alloc.assign(0, 0, 0, 1.0);
    alloc.assign(1, 0, 0, 0.0);
    const SolveReport rep = solve_phantom_powers(make_power_problem(gains, net, alloc));
    OracleBudget fine;
    fine.levels = 100001;
    fine.max_points = 200000;
    const OracleResult grid = grid_power_search({gains, net, alloc, BudgetScope::PerCell}, alloc, fine);
    const double p_ref = grid.allocation.power(1, 0);
    cases.push_back(make_case("nlp_binding_single_carrier", rep.powers(1, 0), p_ref, 1e-3 * p_ref));
  }

  Rng rng(seed);
  std::uniform_real_distribution<double> fraction(0.0, 0.95);
  for (int s = 0; s < instances_per_band; ++s) {
    const Environment env = s % 2 == 0 ? Environment::Indoor : Environment::Outdoor;
    const std::uint64_t inst_seed = trial_seed(seed, s);

    const SmallInstance f2i = small_instance(env, Band::F2, 2, 2, 2, 2, inst_seed);
    const f2::Result heur = f2::run(f2i.gains, f2i.network);
    const double got = throughput(heur.allocation, f2i.gains, f2i.network).phantom_total;
    const OracleResult ref = brute_force({f2i.gains, f2i.network, Allocation{}, BudgetScope::PerCell});
    cases.push_back(make_case("f2_oracle_" + std::to_string(s), got, ref.objective,
                              std::max(0.05 * ref.objective, ref.grid_step_slack)));

    SmallInstance f1i = small_instance(env, Band::F1, 1, 2, 2, 2, inst_seed);
    const double capacity = f1::feasibility_gate(f1i.gains, f1i.network).macro_capacity;
    f1i.network.r_min = fraction(rng) * capacity;
    f1::Options opts;
    opts.solver.seed = inst_seed;
    const f1::Result f1r = f1::run(f1i.gains, f1i.network, opts);
    const RateReport rates = throughput(f1r.allocation, f1i.gains, f1i.network);
    const OracleResult f1ref = brute_force({f1i.gains, f1i.network, f1r.gate.macro, BudgetScope::PerCell});
    ValidationCase vc = make_case("f1_oracle_" + std::to_string(s), rates.phantom_total, f1ref.objective,
                                  std::max(0.05 * f1ref.objective, f1ref.grid_step_slack));
    vc.passed = vc.passed && rates.macro_total >= f1i.network.r_min - 1e-6;
    cases.push_back(vc);
  }
  return cases;
}

}  // namespace hetnet
