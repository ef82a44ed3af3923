#pragma once

#include <Eigen/QR>
#include <optional>
#include <random>

#include "fbstab/ops.hpp"
#include "fbstab/pfb.hpp"
#include "fbstab/qp.hpp"

namespace testsupport {

using fbstab::DenseQP;
using fbstab::JacobianScalars;
using fbstab::Matrix;
using fbstab::OcpQP;
using fbstab::PrimalDualPoint;
using fbstab::Residual;
using fbstab::Vector;

inline Matrix random_matrix(std::mt19937& rng, Eigen::Index rows, Eigen::Index cols,
                            double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = u(rng);
  return M;
}

inline Vector random_vector(std::mt19937& rng, Eigen::Index n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

/// H = M'M + rho I, PSD by construction (singular when rho = 0 and M is wide).
inline Matrix random_psd(std::mt19937& rng, Eigen::Index n, double rho,
                         Eigen::Index rank = -1) {
  if (rank < 0) rank = n;
  const Matrix M = random_matrix(rng, rank, n);
  Matrix H = M.transpose() * M;
  H.diagonal().array() += rho;
  return 0.5 * (H + H.transpose());
}

/// Feasible-and-solvable QP built around a known KKT point: active rows are
/// tight with positive multipliers, inactive rows get slack, and f closes
/// the stationarity condition.
inline DenseQP random_feasible_qp(std::mt19937& rng, Eigen::Index n, Eigen::Index m,
                                  Eigen::Index q, double rho) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Matrix H = random_psd(rng, n, rho);
  const Matrix G = random_matrix(rng, m, n);
  const Matrix A = random_matrix(rng, q, n);
  const Vector zstar = random_vector(rng, n);
  const Vector lstar = random_vector(rng, m);
  Vector vstar = Vector::Zero(q);
  Vector b(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    if (u01(rng) < 0.4) {
      vstar[i] = u01(rng) + 0.1;           // active row
      b[i] = A.row(i).dot(zstar);
    } else {
      b[i] = A.row(i).dot(zstar) + u01(rng) + 0.1;  // slack
    }
  }
  const Vector h = G * zstar;
  const Vector f = -(H * zstar + G.transpose() * lstar + A.transpose() * vstar);
  return fbstab::make_dense_qp(H, f, G, h, A, b);
}

/// Primal-infeasible QP: random rows plus the contradictory pair
/// a'z <= beta, -a'z <= -beta - gap. H is made positive definite so the dual
/// is feasible and the instance is unambiguously primal infeasible.
inline DenseQP random_primal_infeasible_qp(std::mt19937& rng, Eigen::Index n,
                                           Eigen::Index q_extra) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Matrix H = random_psd(rng, n, 1e-3);
  const Vector f = random_vector(rng, n);
  const Eigen::Index q = q_extra + 2;
  Matrix A(q, n);
  Vector b(q);
  for (Eigen::Index i = 0; i < q_extra; ++i) {
    A.row(i) = random_matrix(rng, 1, n);
    b[i] = u01(rng) + 0.5;
  }
  const Vector a = random_vector(rng, n) + Vector::Constant(n, 0.1);
  const double beta = u01(rng);
  A.row(q_extra) = a.transpose();
  b[q_extra] = beta;
  A.row(q_extra + 1) = -a.transpose();
  b[q_extra + 1] = -beta - (0.5 + u01(rng));
  return fbstab::make_dense_qp(H, f, Matrix(), Vector(), A, b);
}

/// Dual-infeasible (unbounded) QP: H has the one-dimensional nullspace
/// span{dir}, f descends along dir, all constraint rows are nonpositive on
/// dir, and the feasible set contains z0 = 0.
inline DenseQP random_dual_infeasible_qp(std::mt19937& rng, Eigen::Index n,
                                         Eigen::Index q) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Vector dir = random_vector(rng, n);
  dir.normalize();
  Matrix M = random_matrix(rng, n - 1, n);
  M = M - (M * dir) * dir.transpose();  // rows orthogonal to dir
  Matrix H = M.transpose() * M;
  H = 0.5 * (H + H.transpose());
  Vector f = random_vector(rng, n);
  f -= (f.dot(dir) + 0.5 + u01(rng)) * dir;  // f'dir < 0
  Matrix A(q, n);
  Vector b(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    Vector a = random_vector(rng, n);
    a -= std::max(0.0, a.dot(dir) + u01(rng)) * dir;  // a'dir <= 0
    A.row(i) = a.transpose();
    b[i] = u01(rng) + 0.25;  // origin feasible
  }
  return fbstab::make_dense_qp(H, f, Matrix(), Vector(), A, b);
}

/// Parameterized 2-d test QP:
///   min 1/2 x1^2 + x1 + c x2
///   s.t. a1 x1 + a2 x2 <= 0, 1 <= x1 <= 3, 1 <= x2 (<= ub when given).
/// Rows in order: (a1,a2), -x1 <= -1, x1 <= 3, -x2 <= -1, x2 <= ub.
inline DenseQP parametric_qp(double a1, double a2, double c,
                             std::optional<double> ub) {
  Matrix H(2, 2);
  H << 1, 0, 0, 0;
  Vector f(2);
  f << 1, c;
  const Eigen::Index q = ub ? 5 : 4;
  Matrix A = Matrix::Zero(q, 2);
  Vector b(q);
  A.row(0) << a1, a2;
  b[0] = 0;
  A.row(1) << -1, 0;
  b[1] = -1;
  A.row(2) << 1, 0;
  b[2] = 3;
  A.row(3) << 0, -1;
  b[3] = -1;
  if (ub) {
    A.row(4) << 0, 1;
    b[4] = *ub;
  }
  return fbstab::make_dense_qp(H, f, Matrix(), Vector(), A, b);
}

/// Random OCP with PSD stage costs, stable-ish dynamics, and constraints
/// kept feasible at u = 0 by generous offsets.
inline OcpQP random_ocp(std::mt19937& rng, int N, Eigen::Index nx, Eigen::Index nu,
                        Eigen::Index nc, double cost_rho = 1e-2) {
  OcpQP p;
  for (int i = 0; i <= N; ++i) {
    const Matrix W = random_psd(rng, nx + nu, cost_rho);
    p.Q.push_back(W.topLeftCorner(nx, nx));
    p.S.push_back(W.bottomLeftCorner(nu, nx));
    p.R.push_back(W.bottomRightCorner(nu, nu));
    p.q.push_back(random_vector(rng, nx, 0.5));
    p.r.push_back(random_vector(rng, nu, 0.5));
    p.E.push_back(random_matrix(rng, nc, nx, 0.3));
    p.L.push_back(random_matrix(rng, nc, nu, 0.3));
    p.d.push_back(Vector::Constant(nc, -2.0) - random_vector(rng, nc, 0.5).cwiseAbs());
  }
  for (int i = 0; i < N; ++i) {
    Matrix A = random_matrix(rng, nx, nx);
    A /= (A.cwiseAbs().rowwise().sum().maxCoeff() + 0.2);  // keep trajectories bounded
    p.A.push_back(A);
    p.B.push_back(random_matrix(rng, nx, nu, 0.5));
    p.c.push_back(random_vector(rng, nx, 0.1));
  }
  p.xi = random_vector(rng, nx, 0.3);
  return p;
}

/// Random valid jacobian scalars: gamma, mu > 0.
inline JacobianScalars random_scalars(std::mt19937& rng, Eigen::Index q, double sigma) {
  std::uniform_real_distribution<double> u(0.05, 2.0);
  JacobianScalars s;
  s.sigma = sigma;
  s.gamma.resize(q);
  s.mu.resize(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    s.gamma[i] = u(rng);
    s.mu[i] = u(rng);
  }
  return s;
}

/// Explicit assembly of the Newton-step matrix V for a dense problem; the
/// independent route used to cross-check the backends.
inline Matrix assemble_expanded_jacobian(const DenseQP& p, const JacobianScalars& s) {
  const Eigen::Index n = p.num_variables(), m = p.num_equalities(),
                     q = p.num_inequalities();
  const double sig = s.sigma;
  Matrix V = Matrix::Zero(n + m + q, n + m + q);
  V.block(0, 0, n, n) = 0.5 * (p.H + p.H.transpose());
  V.block(0, 0, n, n).diagonal().array() += sig;
  if (m > 0) {
    V.block(0, n, n, m) = p.G.transpose();
    V.block(n, 0, m, n) = -p.G;
    V.block(n, n, m, m) = sig * Matrix::Identity(m, m);
  }
  if (q > 0) {
    V.block(0, n + m, n, q) = p.A.transpose();
    V.block(n + m, 0, q, n) = -(s.gamma.asDiagonal() * p.A);
    V.block(n + m, n + m, q, q) = Vector(s.mu + sig * s.gamma).asDiagonal();
  }
  return V;
}

inline Vector stack_residual(const Residual& r) {
  Vector out(r.rz.size() + r.rl.size() + r.rv.size());
  out.segment(0, r.rz.size()) = r.rz;
  out.segment(r.rz.size(), r.rl.size()) = r.rl;
  out.segment(r.rz.size() + r.rl.size(), r.rv.size()) = r.rv;
  return out;
}

/// Reference linear solve of V dx = -R by an orthogonal decomposition.
inline PrimalDualPoint expanded_solve(const DenseQP& p, const JacobianScalars& s,
                                      const Residual& r) {
  const Matrix V = assemble_expanded_jacobian(p, s);
  const Vector rhs = -stack_residual(r);
  const Vector sol = V.colPivHouseholderQr().solve(rhs);
  const Eigen::Index n = p.num_variables(), m = p.num_equalities();
  return {sol.segment(0, n), sol.segment(n, m), sol.segment(n + m, p.num_inequalities())};
}

}  // namespace testsupport
