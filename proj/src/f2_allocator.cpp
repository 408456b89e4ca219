#include "hetnet/f2_allocator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hetnet::f2 {

Selection select_user(const std::vector<Candidate>& candidates) {
  Selection best;
  best.metric = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Candidate& c = candidates[k];
    const double h = selection_metric(c.gain, c.power, c.interference, c.lambda, c.mu);
    if (h > best.metric) {
      best.metric = h;
      best.user = static_cast<int>(k);
      best.power = c.power;
    }
  }
  if (best.metric < 0.0) return {std::nullopt, 0.0, best.metric};
  return best;
}

StepSizes diminishing_steps(const NetworkConfig& config, int t, double scale) {
  const double root = std::sqrt(static_cast<double>(std::max(t, 1)));
  const Eigen::VectorXd& mask = config.mask_f2;
  return {(scale / (config.budget.array().square() * root)).matrix(),
          (scale / (mask.array().square() * root)).matrix()};
}

DualState initial_duals(const NetworkConfig& config) {
  DualState s;
  s.lambda = Eigen::VectorXd::Zero(config.total_users());
  s.mu = Eigen::MatrixXd::Zero(config.total_users(), config.subcarriers_f2);
  for (int m = 1; m < config.num_cells(); ++m)
    s.lambda.segment(config.user_offset(m), config.users_in(m)).setConstant(1.0 / config.budget(m));
  return s;
}

DualState dual_update(const DualState& state, const Allocation& alloc, const NetworkConfig& config,
                      const StepSizes& steps) {
  DualState next = state;
  for (int m = 1; m < config.num_cells(); ++m) {
    for (int k = 0; k < config.users_in(m); ++k) {
      const int u = config.global_user(m, k);
      double used = 0.0;
      for (int i = 0; i < alloc.num_subcarriers(); ++i) {
        const double s = alloc.user(m, i) == k ? alloc.power(m, i) : 0.0;
        used += s;
        next.mu(u, i) = std::max(0.0, state.mu(u, i) - steps.mu(m) * (config.mask_f2(m) - s));
      }
      next.lambda(u) = std::max(0.0, state.lambda(u) - steps.lambda(m) * (config.budget(m) - used));
    }
  }
  next.t = state.t + 1;
  return next;
}

namespace {

double max_relative_change(const DualState& a, const DualState& b, const NetworkConfig& config) {
  double change = 0.0;
  for (int m = 1; m < config.num_cells(); ++m) {
    const double lambda_ref = 1.0 / config.budget(m);
    const double mu_ref = 1.0 / config.mask_f2(m);
    for (int k = 0; k < config.users_in(m); ++k) {
      const int u = config.global_user(m, k);
      change = std::max(change, std::abs(b.lambda(u) - a.lambda(u)) / std::max(std::abs(a.lambda(u)), lambda_ref));
      for (int i = 0; i < config.subcarriers_f2; ++i)
        change = std::max(change, std::abs(b.mu(u, i) - a.mu(u, i)) / std::max(std::abs(a.mu(u, i)), mu_ref));
    }
  }
  return change;
}

double phantom_objective(const Allocation& alloc, const ChannelGains& gains, const NetworkConfig& config) {
  double total = 0.0;
  for (int m = 1; m < config.num_cells(); ++m)
    for (int i = 0; i < alloc.num_subcarriers(); ++i)
      if (const auto k = alloc.user(m, i); k && alloc.power(m, i) > 0.0)
        total += std::log1p(gains(m, config.global_user(m, *k), i) * alloc.power(m, i) /
                            interference(alloc, gains, config, m, *k, i));
  return total;
}

// Per-cell budget is the hard invariant of an allocation; per-user duals
// cannot enforce it when the masks sum above the budget.
void enforce_cell_budgets(Allocation& alloc, const NetworkConfig& config) {
  for (int m = 1; m < config.num_cells(); ++m) {
    const double used = alloc.powers().row(m).sum();
    if (used <= config.budget(m)) continue;
    const double scale = config.budget(m) / used;
    for (int i = 0; i < alloc.num_subcarriers(); ++i)
      if (alloc.user(m, i)) alloc.set_power(m, i, alloc.power(m, i) * scale);
  }
}

// Greedy pass: drop any transmitting slot whose removal raises the phantom
// sum rate, until none does.
int prune_slots(Allocation& alloc, const ChannelGains& gains, const NetworkConfig& config) {
  int dropped = 0;
  double current = phantom_objective(alloc, gains, config);
  for (bool improved = true; improved;) {
    improved = false;
    for (int m = 1; m < config.num_cells(); ++m)
      for (int i = 0; i < alloc.num_subcarriers(); ++i) {
        if (!alloc.user(m, i) || alloc.power(m, i) <= 0.0) continue;
        Allocation trial = alloc;
        trial.clear(m, i);
        const double value = phantom_objective(trial, gains, config);
        if (value > current + 1e-12 * (1.0 + std::abs(current))) {
          alloc = std::move(trial);
          current = value;
          ++dropped;
          improved = true;
        }
      }
  }
  return dropped;
}

}  // namespace

Result run(const ChannelGains& gains, const NetworkConfig& config, const Options& options, bool keep_iterates) {
  if (gains.band() != Band::F2) throw std::invalid_argument("f2::run: needs F2 gains");
  config.validate();
  const int n = config.subcarriers_f2;
  const int phantom_users = config.total_users() - config.users_in(0);

  // Interference for the first pass assumes every cell transmits at its mask
  // to its best-gain user.
  Allocation current(Band::F2, config.num_cells(), n);
  for (int m = 1; m < config.num_cells(); ++m) {
    const Eigen::MatrixXd own = gains.from(m).middleRows(config.user_offset(m), config.users_in(m));
    const std::vector<int> best = macro_assignment(own);
    for (int i = 0; i < n; ++i) current.assign(m, i, best[static_cast<std::size_t>(i)], config.mask_f2(m));
  }
  enforce_cell_budgets(current, config);

  Result result;
  result.duals = initial_duals(config);
  if (config.phantom_cells == 0) {
    result.allocation = Allocation(Band::F2, config.num_cells(), n);
    result.converged = true;
    return result;
  }

  std::vector<Candidate> candidates;
  Allocation best = current;
  double best_objective = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    Allocation next(Band::F2, config.num_cells(), n);
    for (int m = 1; m < config.num_cells(); ++m) {
      for (int i = 0; i < n; ++i) {
        candidates.clear();
        for (int k = 0; k < config.users_in(m); ++k) {
          const int u = config.global_user(m, k);
          const double h = gains(m, u, i);
          const double interf = interference(current, gains, config, m, k, i);
          const double lambda = result.duals.lambda(u);
          candidates.push_back({h, interf, power_update(lambda, interf, h, config.mask_f2(m)), lambda,
                                result.duals.mu(u, i)});
        }
        const Selection pick = select_user(candidates);
        if (pick.user) next.assign(m, i, *pick.user, pick.power);
      }
    }
    const DualState updated =
        dual_update(result.duals, next, config, diminishing_steps(config, result.duals.t, options.step_scale));
    const double change = max_relative_change(result.duals, updated, config);
    result.duals = updated;

    enforce_cell_budgets(next, config);
    current = std::move(next);
    result.iterations = it + 1;
    result.dual_change.push_back(change);
    result.average_power.push_back(current.powers().bottomRows(config.phantom_cells).sum() / phantom_users);
    result.objective.push_back(phantom_objective(current, gains, config));
    if (keep_iterates) result.iterates.push_back(current);
    if (result.objective.back() > best_objective) {
      best_objective = result.objective.back();
      best = current;
    }
    if (it > 0 && change < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.allocation = result.converged ? current : best;
  if (options.prune) result.pruned = prune_slots(result.allocation, gains, config);
  return result;
}

}  // namespace hetnet::f2
