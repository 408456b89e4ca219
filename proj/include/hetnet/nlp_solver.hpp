// Fixed-assignment phantom power optimization: maximize the phantom sum rate
// subject to the macro minimum-rate constraint, per-cell budgets and
// per-subcarrier masks. The problem is nonconvex; the solver returns a
// feasible local maximizer.
#ifndef HETNET_NLP_SOLVER_HPP
#define HETNET_NLP_SOLVER_HPP

#include "hetnet/channel.hpp"
#include "hetnet/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hetnet {

/// Dense form of one power problem. Row 0 of every cells x subcarriers matrix
/// is the macro, whose powers are fixed; phantom rows are the variables.
struct PowerProblem {
  Band band = Band::F1;
  int num_cells = 1;
  int num_subcarriers = 1;
  /// coupling[i](j, m): gain from BS j to the user that cell m serves on
  /// subcarrier i (zero where cell m serves nobody, or j is silent on the band).
  std::vector<Eigen::MatrixXd> coupling;
  /// cell m serves a user on subcarrier i.
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> active;
  Eigen::VectorXd macro_power;      // per subcarrier, fixed
  bool macro_constrained = false;   // enforce macro rate >= r_min
  double r_min = 0.0;
  Eigen::VectorXd budget;           // per cell
  Eigen::VectorXd mask;             // per cell
  double noise = 1.0;

  int num_variables() const;
};

/// Builds the problem for the assignment held in `alloc`. On F1 the macro
/// row of `alloc` supplies the fixed macro assignment and powers; phantom
/// powers in `alloc` are ignored.
PowerProblem make_power_problem(const ChannelGains& gains, const NetworkConfig& config, const Allocation& alloc);

struct ObjectiveGradient {
  double value = 0.0;
  Eigen::MatrixXd gradient;   // cells x subcarriers, zero on macro row and idle slots
};

/// Phantom sum rate and its exact gradient. The macro row of `powers` is
/// ignored (the problem's fixed macro powers are used).
ObjectiveGradient objective_and_gradient(const PowerProblem& problem, const Eigen::MatrixXd& powers);

/// Macro sum rate and its gradient with respect to the phantom powers.
ObjectiveGradient macro_rate_and_gradient(const PowerProblem& problem, const Eigen::MatrixXd& powers);

struct SolveOptions {
  int restarts = 4;                 // zero, mask/2, then random starts (plus a greedy start under a macro target)
  int max_iterations = 2000;        // per projected Newton run
  double tolerance = 1e-7;          // predicted gain of the projected Newton step, scaled by 1 + |objective|
  double armijo = 1e-4;
  double constraint_tolerance = 1e-6;
  int max_penalty_rounds = 40;
  std::uint64_t seed = 0;
  std::optional<Eigen::MatrixXd> warm_start;   // extra start, kept if best
};

struct SolveReport {
  Eigen::MatrixXd powers;   // cells x subcarriers, macro row = fixed macro powers
  double objective = 0.0;
  double macro_rate = 0.0;
  bool converged = false;
  int iterations = 0;
  int restarts = 0;
  long evaluations = 0;
};

/// Requires the all-zero phantom point to be feasible (throws
/// std::invalid_argument otherwise). Returned powers satisfy boxes and budgets
/// exactly and the macro constraint with nonnegative slack.
SolveReport solve_phantom_powers(const PowerProblem& problem, const SolveOptions& options = {});

/// Euclidean projection of y onto {0 <= x <= 1, sum x <= cap}.
Eigen::VectorXd project_capped_box(const Eigen::VectorXd& y, double cap);

}  // namespace hetnet

#endif  // HETNET_NLP_SOLVER_HPP
