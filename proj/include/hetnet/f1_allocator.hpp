// Shared-band allocation: feasibility gate on the macro water-filling
// capacity, then alternating phantom power optimization and best-rate
// subcarrier reassignment.
#ifndef HETNET_F1_ALLOCATOR_HPP
#define HETNET_F1_ALLOCATOR_HPP

#include "hetnet/model.hpp"
#include "hetnet/nlp_solver.hpp"

#include <vector>

namespace hetnet::f1 {

enum class GateStatus { Infeasible, MacroOnly, Proceed };

const char* to_string(GateStatus status);

struct GateOutcome {
  GateStatus status = GateStatus::Proceed;
  Allocation macro;              // macro water-filling allocation, phantoms empty
  double macro_capacity = 0.0;   // R0*, nats
};

/// Best-gain macro assignment plus cap-limited water-filling, phantoms
/// ignored; R0* is compared with r_min at kRateTolerance relative.
GateOutcome feasibility_gate(const ChannelGains& gains, const NetworkConfig& config);

/// Reassigns every phantom (cell, subcarrier) to the user with the highest
/// rate at the current powers; powers are kept. Ties go to the lowest index.
Allocation update_assignment(const ChannelGains& gains, const NetworkConfig& config, const Allocation& current);

/// Per-cell best-gain assignment for the phantom cells (powers zero).
Allocation initial_assignment(const ChannelGains& gains, const NetworkConfig& config, const Allocation& macro);

struct Options {
  SolveOptions solver;
  int max_outer = 50;
  double tolerance = 1e-6;   // max |dp| / P_TH between outer iterations
};

struct Result {
  GateOutcome gate;
  Allocation allocation;
  std::vector<double> trace;        // phantom objective after each power solve
  std::vector<long> evaluations;    // objective evaluations spent per outer iteration
  int iterations = 0;               // outer iterations (Delta_1)
  bool converged = false;           // outer loop settled and every power solve converged
  bool solver_converged = true;
};

/// Alternating power / assignment optimization from `start`, whose macro row
/// is kept fixed. Works on either band (no macro on F2).
Result optimize(const ChannelGains& gains, const NetworkConfig& config, const Allocation& start,
                const Options& options = {});

/// Full shared-band procedure. Infeasible and MacroOnly gates short-circuit:
/// the former returns an empty allocation, the latter the macro-only one.
Result run(const ChannelGains& gains, const NetworkConfig& config, const Options& options = {});

}  // namespace hetnet::f1

#endif  // HETNET_F1_ALLOCATOR_HPP
