#pragma once

#include <iosfwd>
#include <utility>

#include "fbstab/solver.hpp"

namespace fbstab {

/// Scaling-and-squaring matrix exponential (diagonal Pade-6 core).
Matrix matrix_exponential(const Matrix& M);

struct LinearModel {
  Matrix A;   // discrete state matrix
  Matrix B;   // discrete input matrix
  Matrix C;   // output map
  double Ts;  // sampling period, seconds
};

/// Exact zero-order-hold discretization: A_d = exp(Ac Ts) and
/// B_d = (int_0^Ts exp(Ac s) ds) Bc, via the exponential of the augmented
/// block matrix [[Ac, Bc], [0, 0]] * Ts.
std::pair<Matrix, Matrix> zoh_discretize(const Matrix& Ac, const Matrix& Bc, double Ts);

/// Servo-motor tracking benchmark: 4 states, 1 input, discretized at 0.05 s.
/// Drives the load angle y1 = x1 (radians internally) to 30 degrees subject
/// to a +-78.5 Nm shaft torque constraint on y2 = 1282 x1 - 64 x3 and a
/// +-220 V input constraint (nc = 4 rows per stage: +y2, -y2, +u, -u).
/// Terminal weight equals the stage weight.
OcpQP build_servo(int N);

/// Spacecraft relative-motion benchmark on the Hill-Clohessy-Wiltshire
/// dynamics (omega = 0.0011 1/s) with impulsive thrusts at a 30 s period:
/// x_{k+1} = A(x_k + [0; I] u_k). Positions/velocities in meters and m/s,
/// initial offset (-2800, -10, -1000) m. Constraints |u|_inf <= 1 and
/// velocity |x_{4..6}|_inf <= 1 (nc = 12 rows per stage: inputs first).
OcpQP build_hcw(int N);

struct ClosedLoopStep {
  int step = 0;
  Vector state;  // state at the beginning of the step
  Vector input;  // first control of the solved horizon
  int outer_iterations = 0;
  long inner_iterations = 0;
  int max_inner_per_subproblem = 0;
  double pi_norm = 0.0;
  SolveStatus status = SolveStatus::Optimal;
};

struct ClosedLoopLog {
  std::vector<ClosedLoopStep> steps;
  Vector final_state;
  bool all_optimal = true;
};

struct ClosedLoopOptions {
  int steps = 40;
  bool warmstart = true;  // seed with the one-stage-shifted previous solution
  SolverOptions solver;
  Backend backend = Backend::Automatic;
};

/// Receding-horizon simulation: at every step solves the OcpQP from the
/// current state, applies the first control to the same discrete-time model
/// (plant equals prediction model) and shifts. Solver failures propagate as
/// log entries with all_optimal cleared.
ClosedLoopLog closed_loop_sim(const OcpQP& prototype, const ClosedLoopOptions& opts);

/// Trajectory CSV: header step,t,x1..xnx,u1..unu,outer_iters,inner_iters,
/// pi_norm,status; numbers carry 17 significant digits.
void write_trajectory_csv(const ClosedLoopLog& log, double Ts, std::ostream& os);

struct DemoSummary {
  int steps = 0;
  double final_tracking_error = 0.0;  // model-specific, see summarize_*
  double max_input_violation = 0.0;
  double max_state_violation = 0.0;
  int max_outer_iterations = 0;
  int max_inner_iterations = 0;
  double median_inner_iterations = 0.0;
  long total_inner_iterations = 0;
  double max_pi_norm = 0.0;
  bool all_optimal = true;
};

/// Servo metrics: tracking error |y1 - 30| at the final step, input
/// violation against 220 V, state violation of |y2| against 78.5.
DemoSummary summarize_servo(const ClosedLoopLog& log);

/// Spacecraft metrics: ||position|| at the final state relative to the
/// initial offset, input violation against 1, velocity violation against 1.
DemoSummary summarize_hcw(const ClosedLoopLog& log);

}  // namespace fbstab
