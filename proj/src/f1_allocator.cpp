#include "hetnet/f1_allocator.hpp"

#include "hetnet/waterfill.hpp"

#include <cmath>
#include <stdexcept>

namespace hetnet::f1 {

const char* to_string(GateStatus status) {
  switch (status) {
    case GateStatus::Infeasible: return "infeasible";
    case GateStatus::MacroOnly: return "macro_only";
    case GateStatus::Proceed: return "proceed";
  }
  return "?";
}

GateOutcome feasibility_gate(const ChannelGains& gains, const NetworkConfig& config) {
  if (gains.band() != Band::F1) throw std::invalid_argument("feasibility_gate: needs F1 gains");
  const int n = config.subcarriers_f1;
  const int k0 = config.users_in(0);
  const Eigen::MatrixXd macro_gains = gains.from(0).topRows(k0);
  const std::vector<int> best = macro_assignment(macro_gains);

  Eigen::VectorXd best_gain(n);
  for (int i = 0; i < n; ++i) best_gain(i) = macro_gains(best[static_cast<std::size_t>(i)], i);
  const Eigen::VectorXd caps = Eigen::VectorXd::Constant(n, config.mask_f1(0));
  const auto wf = capped_waterfill(best_gain, config.noise_power, config.budget(0), caps);

  GateOutcome out;
  out.macro = Allocation(Band::F1, config.num_cells(), n);
  for (int i = 0; i < n; ++i) {
    out.macro.assign(0, i, best[static_cast<std::size_t>(i)], wf.powers(i));
    out.macro_capacity += std::log1p(best_gain(i) * wf.powers(i) / config.noise_power);
  }
  const double slack = kRateTolerance * std::max(config.r_min, 1e-300);
  if (out.macro_capacity < config.r_min - slack) out.status = GateStatus::Infeasible;
  else if (out.macro_capacity <= config.r_min + slack) out.status = GateStatus::MacroOnly;
  else out.status = GateStatus::Proceed;
  return out;
}

Allocation initial_assignment(const ChannelGains& gains, const NetworkConfig& config, const Allocation& macro) {
  Allocation alloc = macro;
  const int n = alloc.num_subcarriers();
  for (int m = 1; m < config.num_cells(); ++m) {
    const int offset = config.user_offset(m);
    const Eigen::MatrixXd own = gains.from(m).middleRows(offset, config.users_in(m));
    const std::vector<int> best = macro_assignment(own);
    for (int i = 0; i < n; ++i) alloc.assign(m, i, best[static_cast<std::size_t>(i)], 0.0);
  }
  return alloc;
}

Allocation update_assignment(const ChannelGains& gains, const NetworkConfig& config, const Allocation& current) {
  Allocation next = current;
  for (int m = 1; m < config.num_cells(); ++m) {
    for (int i = 0; i < current.num_subcarriers(); ++i) {
      const double p = current.power(m, i);
      int best = 0;
      double best_rate = -1.0;
      for (int k = 0; k < config.users_in(m); ++k) {
        const double h = gains(m, config.global_user(m, k), i);
        const double r = std::log1p(h * p / interference(current, gains, config, m, k, i));
        if (r > best_rate) {
          best_rate = r;
          best = k;
        }
      }
      next.assign(m, i, best, p);
    }
  }
  return next;
}

Result optimize(const ChannelGains& gains, const NetworkConfig& config, const Allocation& start,
                const Options& options) {
  Result result;
  result.allocation = start;
  if (config.phantom_cells == 0) {
    result.converged = true;
    return result;
  }

  Allocation current = start;
  std::optional<Eigen::MatrixXd> previous;
  for (int outer = 0; outer < options.max_outer; ++outer) {
    SolveOptions solve = options.solver;
    solve.seed = options.solver.seed + static_cast<std::uint64_t>(outer);
    if (previous) solve.warm_start = *previous;
    const PowerProblem problem = make_power_problem(gains, config, current);
    const SolveReport rep = solve_phantom_powers(problem, solve);
    result.solver_converged = result.solver_converged && rep.converged;

    for (int m = 1; m < config.num_cells(); ++m)
      for (int i = 0; i < current.num_subcarriers(); ++i)
        if (current.user(m, i)) current.set_power(m, i, rep.powers(m, i));
    result.trace.push_back(rep.objective);
    result.evaluations.push_back(rep.evaluations);
    result.iterations = outer + 1;
    result.allocation = current;

    bool settled = false;
    if (previous) {
      double change = 0.0;
      for (int m = 1; m < config.num_cells(); ++m)
        for (int i = 0; i < current.num_subcarriers(); ++i)
          change = std::max(change, std::abs(rep.powers(m, i) - (*previous)(m, i)) / config.budget(m));
      settled = change < options.tolerance;
    }
    previous = current.powers();
    if (settled) {
      result.converged = true;
      break;
    }
    current = update_assignment(gains, config, current);
  }
  result.converged = result.converged && result.solver_converged;
  return result;
}

Result run(const ChannelGains& gains, const NetworkConfig& config, const Options& options) {
  config.validate();
  GateOutcome gate = feasibility_gate(gains, config);
  if (gate.status != GateStatus::Proceed) {
    Result result;
    result.allocation = gate.status == GateStatus::MacroOnly ? gate.macro
                                                             : Allocation(Band::F1, config.num_cells(), config.subcarriers_f1);
    result.converged = true;
    result.gate = std::move(gate);
    return result;
  }
  Result result = optimize(gains, config, initial_assignment(gains, config, gate.macro), options);
  result.gate = std::move(gate);
  return result;
}

}  // namespace hetnet::f1
