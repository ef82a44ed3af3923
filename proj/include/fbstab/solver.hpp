#pragma once

#include <optional>
#include <vector>

#include "fbstab/feasibility.hpp"
#include "fbstab/inner_solver.hpp"
#include "fbstab/qp.hpp"

namespace fbstab {

enum class SolveStatus {
  Optimal,
  PrimalInfeasible,
  DualInfeasible,
  PrimalDualInfeasible,
  MaxIterations,
  Stalled,
};

const char* to_string(SolveStatus s);

struct SolverOptions {
  double sigma = 1.490116119384766e-8;  // sqrt of double machine epsilon
  double sigma_scaling = 1.0;           // per-iteration multiplier for sigma
  double tau_rel = 0.0;                 // relative optimality tolerance
  double tau_abs = 1e-4;                // absolute optimality tolerance
  double tau_stall = 1e-12;             // step-size stall tolerance
  double tau_infeas = 1e-8;             // infeasibility detection tolerance
  double kappa = 0.1;                   // geometric decay of the inexactness budget
  int max_outer_iterations = 100;
  InnerOptions inner;
  PfbParams pfb;
  bool collect_trace = false;     // per-iteration diagnostics in the stats
  bool collect_iterates = false;  // also snapshot x after every outer iteration
};

struct OuterIterationTrace {
  double delta = 0.0;            // inexactness budget this iteration
  double inner_tolerance = 0.0;  // delta * sigma
  int inner_iterations = 0;
  double step_norm = 0.0;        // ||x+ - x||
  double inner_residual = 0.0;   // ||R|| at the accepted subproblem iterate
  double natural_residual = 0.0; // ||pi(x)|| after the update
  bool inner_degraded = false;
  std::vector<InnerIterationTrace> inner;
  std::optional<PrimalDualPoint> iterate;
};

struct SolveStats {
  int outer_iterations = 0;
  long total_inner_iterations = 0;
  int max_inner_iterations = 0;  // over subproblems
  double initial_residual = 0.0; // ||pi(x0)||
  double final_residual = 0.0;   // ||pi(x)|| at exit
  double factor_seconds = 0.0;
  double backsolve_seconds = 0.0;
  double total_seconds = 0.0;
  std::vector<OuterIterationTrace> outer;
};

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIterations;
  PrimalDualPoint x;
  std::optional<Certificate> certificate;
  SolveStats stats;
};

enum class Backend { Automatic, Dense, Mpc };

/// Solves a dense-form QP with the dense linear-algebra backend.
SolveResult solve(const DenseQP& p, const PrimalDualPoint& x0, const SolverOptions& opts = {});
SolveResult solve(const DenseQP& p, const SolverOptions& opts = {});

/// Solves an optimal-control QP. Backend::Automatic selects the
/// structure-exploiting backend; Backend::Dense stacks the problem and runs
/// the dense backend on it (iterates are in the same stacked ordering).
SolveResult solve(const OcpQP& p, const PrimalDualPoint& x0, const SolverOptions& opts = {},
                  Backend backend = Backend::Automatic);
SolveResult solve(const OcpQP& p, const SolverOptions& opts = {},
                  Backend backend = Backend::Automatic);

}  // namespace fbstab
