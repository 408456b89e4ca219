// Phantom-only band allocation by Lagrange dual decomposition: closed-form
// per-user powers, per-subcarrier user selection, and projected subgradient
// updates of the budget and mask multipliers.
#ifndef HETNET_F2_ALLOCATOR_HPP
#define HETNET_F2_ALLOCATOR_HPP

#include "hetnet/model.hpp"
#include "hetnet/waterfill.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace hetnet::f2 {

/// lambda: per global user (budget multiplier); mu: per global user and
/// subcarrier (mask multiplier). Macro entries stay at zero.
struct DualState {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd mu;
  int t = 1;
};

inline constexpr double kMinLambda = 1e-12;

/// [1/lambda - I/h]_0^mask. lambda is floored at kMinLambda.
template <typename Scalar>
Scalar power_update(Scalar lambda, Scalar interference, Scalar gain, Scalar mask) {
  const Scalar l = std::max(lambda, Scalar(kMinLambda));
  return cap_clamp(Scalar(1) / l - interference / gain, mask);
}

/// Dual-weighted utility of giving the subcarrier to one user at power p.
template <typename Scalar>
Scalar selection_metric(Scalar gain, Scalar power, Scalar interference, Scalar lambda, Scalar mu) {
  return std::log1p(gain * power / interference) - lambda * power - mu * power;
}

struct Candidate {
  double gain;
  double interference;
  double power;    // from power_update
  double lambda;
  double mu;
};

struct Selection {
  std::optional<int> user;   // empty when every metric is negative
  double power = 0.0;
  double metric = 0.0;
};

/// Argmax of the selection metric over the cell's users (ties: lowest index).
Selection select_user(const std::vector<Candidate>& candidates);

struct StepSizes {
  Eigen::VectorXd lambda;   // per cell
  Eigen::VectorXd mu;       // per cell
};

/// beta(t) = scale / (P^2 sqrt(t)) with P = P_TH for lambda and P_MAX for mu.
StepSizes diminishing_steps(const NetworkConfig& config, int t, double scale);

DualState initial_duals(const NetworkConfig& config);

/// lambda' = [lambda - b1 (P_TH - sum_i S)]^+, mu' = [mu - b2 (P_MAX - S)]^+.
DualState dual_update(const DualState& state, const Allocation& alloc, const NetworkConfig& config,
                      const StepSizes& steps);

struct Options {
  int max_iterations = 500;
  double tolerance = 1e-5;   // relative dual change
  double step_scale = 1.0;
  bool prune = true;         // after the dual loop, switch off slots whose interference costs more than they carry
};

struct Result {
  Allocation allocation;
  DualState duals;
  std::vector<double> dual_change;     // per iteration
  std::vector<double> average_power;   // per phantom user, per iteration
  std::vector<double> objective;       // phantom sum rate of each iterate
  std::vector<Allocation> iterates;    // only when requested
  int iterations = 0;                  // Delta_2
  bool converged = false;
  int pruned = 0;                      // slots switched off by the final pass
};

Result run(const ChannelGains& gains, const NetworkConfig& config, const Options& options = {},
           bool keep_iterates = false);

}  // namespace hetnet::f2

#endif  // HETNET_F2_ALLOCATOR_HPP
