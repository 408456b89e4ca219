// Exhaustive reference solvers for desk-scale instances: every assignment
// and every point of a uniform power grid, with budgets and the macro-rate
// target applied as filters.
#ifndef HETNET_ORACLE_HPP
#define HETNET_ORACLE_HPP

#include "hetnet/model.hpp"

#include <stdexcept>

namespace hetnet {

struct OracleBudget {
  long long max_assignments = 4096;
  int levels = 64;                  // grid levels per variable, 0 and mask included
  int max_variables = 6;            // phantom (cell, subcarrier) slots
  long long max_points = 10'000'000'000LL;
};

/// Which sums the power budget constrains.
enum class BudgetScope { PerCell, PerUser };

struct BandProblem {
  ChannelGains gains;
  NetworkConfig config;
  Allocation macro;   // F1: fixed macro assignment and powers; ignored on F2
  BudgetScope scope = BudgetScope::PerCell;
};

struct OracleResult {
  bool feasible = false;
  Allocation allocation;
  double objective = 0.0;       // phantom sum rate
  double macro_rate = 0.0;
  long long assignments = 0;
  long long grid_points = 0;
  /// Largest objective loss from lowering one variable of the optimum by one
  /// grid level.
  double grid_step_slack = 0.0;
};

class OracleBudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Exact maximizer over all phantom assignments and grid powers.
OracleResult brute_force(const BandProblem& problem, const OracleBudget& budget = {});

/// Exact grid maximizer at the phantom assignment held in `assignment`.
OracleResult grid_power_search(const BandProblem& problem, const Allocation& assignment,
                               const OracleBudget& budget = {});

}  // namespace hetnet

#endif  // HETNET_ORACLE_HPP
