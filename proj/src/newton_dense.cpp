#include "fbstab/newton_dense.hpp"

namespace fbstab {

DenseNewtonBackend::DenseNewtonBackend(const DenseOps& ops) : ops_(&ops) {
  const Eigen::Index n = ops.n();
  K_.resize(n, n);
  if (ops.m() > 0) {
    GtG_ = Matrix::Zero(n, n);
    GtG_.selfadjointView<Eigen::Lower>().rankUpdate(ops.G().transpose());
  }
  if (ops.q() > 0) Aw_.resize(ops.q(), n);
}

void DenseNewtonBackend::factor(const JacobianScalars& s) {
  const Eigen::Index q = ops_->q();
  scalars_ = s;
  sigma_ = s.sigma;
  if (!(sigma_ > 0.0)) throw FactorizationFailure("sigma must be positive");

  if (q > 0) {
    Vector d = s.mu + sigma_ * s.gamma;
    if ((d.array() <= 0.0).any() || ((s.gamma + s.mu).array() <= 0.0).any()) {
      throw FactorizationFailure("invalid jacobian scalars: D must be positive");
    }
    dinv_ = d.cwiseInverse();
    cdinv_ = s.gamma.cwiseProduct(dinv_);
  }

  K_.triangularView<Eigen::Lower>() = ops_->H();
  K_.diagonal().array() += sigma_;
  if (q > 0) {
    Aw_.noalias() = cdinv_.cwiseSqrt().asDiagonal() * ops_->A();
    K_.selfadjointView<Eigen::Lower>().rankUpdate(Aw_.transpose());
  }
  if (ops_->m() > 0) {
    K_.triangularView<Eigen::Lower>() += (1.0 / sigma_) * GtG_;
  }
  // On badly scaled data roundoff in the rank updates can push a pivot
  // below zero even though the exact matrix is positive definite; retry
  // with a roundoff-level diagonal shift before giving up. An indefinite
  // Hessian still fails: its negative curvature dwarfs these shifts.
  const double kscale = K_.diagonal().cwiseAbs().maxCoeff();
  double bump = 0.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    llt_.compute(K_);
    if (llt_.info() == Eigen::Success) {
      factored_ = true;
      return;
    }
    const double next = bump > 0.0 ? bump * 1e3 : 1e-14 * kscale;
    K_.diagonal().array() += next - bump;
    bump = next;
  }
  factored_ = false;
  throw FactorizationFailure("Cholesky failed: reduced matrix not positive definite");
}

PrimalDualPoint DenseNewtonBackend::solve_once(const Residual& r) const {
  const Eigen::Index m = ops_->m(), q = ops_->q();
  Vector rhs = -r.rz;
  if (q > 0) rhs += ops_->ineq_tmul(dinv_.cwiseProduct(r.rv));
  if (m > 0) rhs += (1.0 / sigma_) * ops_->eq_tmul(r.rl);

  PrimalDualPoint dx;
  dx.z = llt_.solve(rhs);
  dx.lambda = m > 0 ? Vector((ops_->eq_mul(dx.z) - r.rl) / sigma_) : Vector(0);
  dx.v = q > 0 ? Vector(cdinv_.cwiseProduct(ops_->ineq_mul(dx.z)) -
                        dinv_.cwiseProduct(r.rv))
               : Vector(0);
  return dx;
}

PrimalDualPoint DenseNewtonBackend::solve(const Residual& r) const {
  if (!factored_) throw FactorizationFailure("solve called before factor");
  PrimalDualPoint dx = solve_once(r);
  Residual defect = jacobian_product(*ops_, scalars_, dx);
  defect.rz += r.rz;
  defect.rl += r.rl;
  defect.rv += r.rv;
  dx += solve_once(defect);
  return dx;
}

}  // namespace fbstab
