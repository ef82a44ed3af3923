#pragma once

#include <Eigen/Cholesky>
#include <vector>

#include "fbstab/newton_dense.hpp"
#include "fbstab/pfb.hpp"
#include "fbstab/qp.hpp"

namespace fbstab {

/// Structure-exploiting backend for OcpQP problems. Solves the same Newton
/// step system as DenseNewtonBackend on the stacked ordering, in
/// O(N (nx+nu)^3) time and O(N (nx+nu)^2) memory.
///
/// After eliminating the inequality duals stage-wise the system is the KKT
/// system of an equality-constrained LQR whose dual block is -sigma I
/// rather than 0. Substituting dl_i = (residual of dynamics row i)/sigma
/// turns the dynamics into quadratic penalties with weight 1/sigma, and the
/// resulting unconstrained block-tridiagonal problem is solved by a
/// regularized Riccati recursion: the cost-to-go P_{i+1} is damped to
/// Phat = (I + sigma P)^{-1} P before each backward step. Every factorized
/// block is positive definite for sigma > 0 and PSD stage costs.
class RiccatiNewtonBackend {
 public:
  explicit RiccatiNewtonBackend(const OcpQP& p);

  /// Scalars are stacked in stage order, q = (N+1)*nc entries.
  /// Throws FactorizationFailure on a non-positive pivot.
  void factor(const JacobianScalars& s);

  /// Backward/forward recursion with one pass of iterative refinement.
  PrimalDualPoint solve(const Residual& r) const;

 private:
  PrimalDualPoint solve_once(const Residual& r) const;

  const OcpQP* p_;
  OcpOps ops_;
  JacobianScalars scalars_;
  int N_;
  Eigen::Index nx_, nu_, nc_, ns_;
  double sigma_ = 0.0;
  bool factored_ = false;

  // Stage data after inequality-dual elimination (N+1 each).
  std::vector<Matrix> Qt_, St_, Rt_;
  std::vector<Vector> dinv_, cdinv_;
  // Backward-pass factors: Fuu/K/Fux for stages 0..N-1, M-factors and
  // cost-to-go for stages 1..N, plus the initial-stage solve.
  std::vector<Eigen::LLT<Matrix, Eigen::Lower>> Fuu_llt_;  // N
  std::vector<Matrix> Kgain_, Fux_;                        // N
  std::vector<Eigen::LLT<Matrix, Eigen::Lower>> M_llt_;    // N (index i -> stage i+1)
  std::vector<Matrix> Phat_;                               // N (index i -> stage i+1)
  std::vector<Matrix> P_;                                  // N+1
  Eigen::LLT<Matrix, Eigen::Lower> Rt_llt_N_;
  Eigen::LLT<Matrix, Eigen::Lower> init_llt_;
};

}  // namespace fbstab
