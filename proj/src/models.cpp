#include "fbstab/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

namespace fbstab {

Matrix matrix_exponential(const Matrix& M) {
  const Eigen::Index n = M.rows();
  const double nrm = n > 0 ? M.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  int squarings = 0;
  if (nrm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  }
  const Matrix T = M / std::ldexp(1.0, squarings);

  // Diagonal Pade-6: exp(T) ~ (V - U)^{-1} (V + U) with U odd, V even.
  const double c[7] = {1.0,      1.0 / 2.0,    5.0 / 44.0,   1.0 / 66.0,
                       1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
  const Matrix I = Matrix::Identity(n, n);
  const Matrix T2 = T * T;
  const Matrix T4 = T2 * T2;
  const Matrix V = c[0] * I + c[2] * T2 + c[4] * T4 + c[6] * T4 * T2;
  const Matrix U = T * (c[1] * I + c[3] * T2 + c[5] * T4);
  Matrix E = (V - U).partialPivLu().solve(V + U);
  for (int s = 0; s < squarings; ++s) E = (E * E).eval();
  return E;
}

std::pair<Matrix, Matrix> zoh_discretize(const Matrix& Ac, const Matrix& Bc, double Ts) {
  const Eigen::Index nx = Ac.rows();
  const Eigen::Index nu = Bc.cols();
  Matrix aug = Matrix::Zero(nx + nu, nx + nu);
  aug.topLeftCorner(nx, nx) = Ac;
  aug.topRightCorner(nx, nu) = Bc;
  const Matrix E = matrix_exponential(aug * Ts);
  return {E.topLeftCorner(nx, nx), E.topRightCorner(nx, nu)};
}

OcpQP build_servo(int N) {
  // Angles in radians; the torque row 1282 x1 - 64 x3 is Nm per radian.
  Matrix Ac(4, 4);
  Ac << 0, 1, 0, 0,
      -128, -2.5, 6.4, 0,
      0, 0, 0, 1,
      128, 0, -6.4, -10.2;
  Matrix Bc(4, 1);
  Bc << 0, 0, 0, 1;
  const auto [Ad, Bd] = zoh_discretize(Ac, Bc, 0.05);

  Matrix Q = Matrix::Zero(4, 4);
  Q(0, 0) = 1e3;
  Matrix R(1, 1);
  R << 1e-4;
  Matrix S = Matrix::Zero(1, 4);
  // Reference of 30 degrees on y1 = x1 enters through the linear term.
  Vector q = Vector::Zero(4);
  q[0] = -1e3 * (30.0 * M_PI / 180.0);
  Vector r = Vector::Zero(1);

  // Rows: +y2 <= 78.5, -y2 <= 78.5, +u <= 220, -u <= 220.
  Matrix E = Matrix::Zero(4, 4);
  E.row(0) << 1282, 0, -64.0, 0;
  E.row(1) << -1282, 0, 64.0, 0;
  Matrix L = Matrix::Zero(4, 1);
  L(2, 0) = 1.0;
  L(3, 0) = -1.0;
  Vector d(4);
  d << -78.5, -78.5, -220.0, -220.0;

  OcpQP p;
  p.Q.assign(N + 1, Q);
  p.R.assign(N + 1, R);
  p.S.assign(N + 1, S);
  p.q.assign(N + 1, q);
  p.r.assign(N + 1, r);
  p.A.assign(N, Ad);
  p.B.assign(N, Bd);
  p.c.assign(N, Vector::Zero(4));
  p.E.assign(N + 1, E);
  p.L.assign(N + 1, L);
  p.d.assign(N + 1, d);
  p.xi = Vector::Zero(4);
  return p;
}

OcpQP build_hcw(int N) {
  const double w = 0.0011;
  Matrix Ac = Matrix::Zero(6, 6);
  Ac.topRightCorner(3, 3) = Matrix::Identity(3, 3);
  Ac(3, 0) = 3.0 * w * w;
  Ac(3, 4) = 2.0 * w;
  Ac(4, 3) = -2.0 * w;
  Ac(5, 2) = -w * w;
  const Matrix Ad = matrix_exponential(Ac * 30.0);
  Matrix impulse = Matrix::Zero(6, 3);
  impulse.bottomRows(3) = Matrix::Identity(3, 3);
  const Matrix Bd = Ad * impulse;

  Matrix Q = Matrix::Zero(6, 6);
  Q.diagonal() << 1, 1, 1, 1e-3, 1e-3, 1e-3;
  Matrix R = Matrix::Identity(3, 3);
  Matrix S = Matrix::Zero(3, 6);

  // Rows: +-u_j <= 1 (inputs first), then +-velocity_j <= 1.
  Matrix E = Matrix::Zero(12, 6);
  Matrix L = Matrix::Zero(12, 3);
  Vector d = Vector::Constant(12, -1.0);
  for (int j = 0; j < 3; ++j) {
    L(2 * j, j) = 1.0;
    L(2 * j + 1, j) = -1.0;
    E(6 + 2 * j, 3 + j) = 1.0;
    E(6 + 2 * j + 1, 3 + j) = -1.0;
  }

  OcpQP p;
  p.Q.assign(N + 1, Q);
  p.R.assign(N + 1, R);
  p.S.assign(N + 1, S);
  p.q.assign(N + 1, Vector::Zero(6));
  p.r.assign(N + 1, Vector::Zero(3));
  p.A.assign(N, Ad);
  p.B.assign(N, Bd);
  p.c.assign(N, Vector::Zero(6));
  p.E.assign(N + 1, E);
  p.L.assign(N + 1, L);
  p.d.assign(N + 1, d);
  p.xi = Vector(6);
  p.xi << -2800.0, -10.0, -1000.0, 0, 0, 0;
  return p;
}

namespace {

// One-stage shift of a stacked primal-dual solution, last stage duplicated.
PrimalDualPoint shift_solution(const PrimalDualPoint& x, int N, Eigen::Index nx,
                               Eigen::Index nu, Eigen::Index nc) {
  const Eigen::Index ns = nx + nu;
  PrimalDualPoint s = x;
  for (int i = 0; i < N; ++i) {
    s.z.segment(i * ns, ns) = x.z.segment((i + 1) * ns, ns);
    s.lambda.segment(i * nx, nx) = x.lambda.segment((i + 1) * nx, nx);
    if (nc > 0) s.v.segment(i * nc, nc) = x.v.segment((i + 1) * nc, nc);
  }
  return s;
}

}  // namespace

ClosedLoopLog closed_loop_sim(const OcpQP& prototype, const ClosedLoopOptions& opts) {
  OcpQP p = prototype;
  const int N = p.horizon();
  const Eigen::Index nx = p.num_states();
  const Eigen::Index nu = p.num_inputs();
  const Eigen::Index nc = p.num_stage_constraints();
  const Matrix& Ad = p.A[0];
  const Matrix& Bd = p.B[0];
  const Vector& cd = p.c[0];

  ClosedLoopLog log;
  Vector state = p.xi;
  PrimalDualPoint seed = PrimalDualPoint::Zero(p.num_variables(), p.num_equalities(),
                                               p.num_inequalities());
  for (int k = 0; k < opts.steps; ++k) {
    p.xi = state;
    const SolveResult res = solve(p, seed, opts.solver, opts.backend);

    ClosedLoopStep entry;
    entry.step = k;
    entry.state = state;
    entry.input = res.x.z.segment(nx, nu);
    entry.outer_iterations = res.stats.outer_iterations;
    entry.inner_iterations = res.stats.total_inner_iterations;
    entry.max_inner_per_subproblem = res.stats.max_inner_iterations;
    entry.pi_norm = res.stats.final_residual;
    entry.status = res.status;
    log.steps.push_back(entry);
    if (res.status != SolveStatus::Optimal) log.all_optimal = false;

    state = Ad * state + Bd * entry.input + cd;
    if (opts.warmstart) {
      seed = shift_solution(res.x, N, nx, nu, nc);
    } else {
      seed = PrimalDualPoint::Zero(p.num_variables(), p.num_equalities(),
                                   p.num_inequalities());
    }
  }
  log.final_state = state;
  return log;
}

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

DemoSummary summarize(const ClosedLoopLog& log,
                      const std::function<double(const Vector&)>& tracking,
                      const std::function<double(const Vector&)>& input_violation,
                      const std::function<double(const Vector&)>& state_violation) {
  DemoSummary s;
  s.steps = static_cast<int>(log.steps.size());
  s.all_optimal = log.all_optimal;
  std::vector<long> inner;
  for (const auto& e : log.steps) {
    s.max_input_violation = std::max(s.max_input_violation, input_violation(e.input));
    s.max_state_violation = std::max(s.max_state_violation, state_violation(e.state));
    s.max_outer_iterations = std::max(s.max_outer_iterations, e.outer_iterations);
    s.max_inner_iterations =
        std::max(s.max_inner_iterations, static_cast<int>(e.inner_iterations));
    s.total_inner_iterations += e.inner_iterations;
    s.max_pi_norm = std::max(s.max_pi_norm, e.pi_norm);
    inner.push_back(e.inner_iterations);
  }
  s.max_state_violation = std::max(s.max_state_violation, state_violation(log.final_state));
  if (!inner.empty()) {
    std::sort(inner.begin(), inner.end());
    const std::size_t h = inner.size() / 2;
    s.median_inner_iterations =
        inner.size() % 2 ? inner[h] : 0.5 * (inner[h - 1] + inner[h]);
  }
  s.final_tracking_error = tracking(log.final_state);
  return s;
}

}  // namespace

void write_trajectory_csv(const ClosedLoopLog& log, double Ts, std::ostream& os) {
  if (log.steps.empty()) return;
  const Eigen::Index nx = log.steps.front().state.size();
  const Eigen::Index nu = log.steps.front().input.size();
  os << "step,t";
  for (Eigen::Index i = 1; i <= nx; ++i) os << ",x" << i;
  for (Eigen::Index i = 1; i <= nu; ++i) os << ",u" << i;
  os << ",outer_iters,inner_iters,pi_norm,status\n";
  for (const auto& e : log.steps) {
    os << e.step << "," << fmt17(e.step * Ts);
    for (Eigen::Index i = 0; i < nx; ++i) os << "," << fmt17(e.state[i]);
    for (Eigen::Index i = 0; i < nu; ++i) os << "," << fmt17(e.input[i]);
    os << "," << e.outer_iterations << "," << e.inner_iterations << ","
       << fmt17(e.pi_norm) << "," << to_string(e.status) << "\n";
  }
}

DemoSummary summarize_servo(const ClosedLoopLog& log) {
  return summarize(
      log,
      [](const Vector& x) { return std::abs(x[0] * 180.0 / M_PI - 30.0); },
      [](const Vector& u) { return std::abs(u[0]) - 220.0; },
      [](const Vector& x) { return std::abs(1282.0 * x[0] - 64.0 * x[2]) - 78.5; });
}

DemoSummary summarize_hcw(const ClosedLoopLog& log) {
  const double initial = Vector(Eigen::Vector3d(-2800.0, -10.0, -1000.0)).norm();
  return summarize(
      log,
      [&](const Vector& x) { return x.segment(0, 3).norm() / initial; },
      [](const Vector& u) { return u.lpNorm<Eigen::Infinity>() - 1.0; },
      [](const Vector& x) { return x.segment(3, 3).lpNorm<Eigen::Infinity>() - 1.0; });
}

}  // namespace fbstab
