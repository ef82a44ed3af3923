#pragma once

#include <Eigen/Cholesky>
#include <stdexcept>

#include "fbstab/ops.hpp"
#include "fbstab/pfb.hpp"

namespace fbstab {

/// Raised when a Newton-step factorization hits a non-positive pivot. With
/// sigma > 0 and valid scalars this signals an indefinite Hessian or
/// numerical breakdown; the driver surfaces it as a hard error.
struct FactorizationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solves the Newton-step system
///
///   [H + sigma I   G'        A'] [dz]       [rz]
///   [-G            sigma I   0 ] [dl] = -  [rl]
///   [-C A          0         D ] [dv]       [rv]
///
/// with C = diag(gamma), D = diag(mu + sigma gamma), by reducing to a single
/// symmetric positive definite system in dz:
///
///   K dz = -rz + A'D^{-1} rv + (1/sigma) G' rl,
///   K = H + sigma I + A'(C D^{-1})A + (1/sigma) G'G,
///
/// then back-substituting dl = (G dz - rl)/sigma and
/// dv = D^{-1}(C A dz - rv). K is positive definite for every sigma > 0 and
/// valid scalars, so a Cholesky factorization is used. G'G is cached across
/// refactorizations since only the scalars change between Newton iterations.
class DenseNewtonBackend {
 public:
  explicit DenseNewtonBackend(const DenseOps& ops);

  /// Refactorizes for a new set of scalars. Throws FactorizationFailure.
  void factor(const JacobianScalars& s);

  /// Back-substitution with one pass of iterative refinement; requires a
  /// successful factor() first.
  PrimalDualPoint solve(const Residual& r) const;

 private:
  PrimalDualPoint solve_once(const Residual& r) const;

  const DenseOps* ops_;
  JacobianScalars scalars_;
  Matrix GtG_;    // cached G'G (lower triangle)
  Matrix K_;      // reduced matrix workspace (lower triangle)
  Matrix Aw_;     // row-scaled copy of A
  Eigen::LLT<Matrix, Eigen::Lower> llt_;
  Vector cdinv_;  // gamma_i / d_i
  Vector dinv_;   // 1 / d_i
  double sigma_ = 0.0;
  bool factored_ = false;
};

}  // namespace fbstab
