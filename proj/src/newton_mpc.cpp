#include "fbstab/newton_mpc.hpp"

namespace fbstab {

RiccatiNewtonBackend::RiccatiNewtonBackend(const OcpQP& p)
    : p_(&p),
      ops_(p),
      N_(p.horizon()),
      nx_(p.num_states()),
      nu_(p.num_inputs()),
      nc_(p.num_stage_constraints()),
      ns_(nx_ + nu_) {
  Qt_.resize(N_ + 1);
  St_.resize(N_ + 1);
  Rt_.resize(N_ + 1);
  dinv_.resize(N_ + 1);
  cdinv_.resize(N_ + 1);
  Fuu_llt_.resize(N_);
  Kgain_.resize(N_);
  Fux_.resize(N_);
  M_llt_.resize(N_);
  Phat_.resize(N_);
  P_.resize(N_ + 1);
}

void RiccatiNewtonBackend::factor(const JacobianScalars& s) {
  scalars_ = s;
  sigma_ = s.sigma;
  if (!(sigma_ > 0.0)) throw FactorizationFailure("sigma must be positive");

  // Stage Hessians with the inequality duals eliminated:
  //   Qt = Q + sigma I + E'(C D^{-1})E, etc.
  for (int i = 0; i <= N_; ++i) {
    Qt_[i] = p_->Q[i];
    Qt_[i].diagonal().array() += sigma_;
    St_[i] = p_->S[i];
    Rt_[i] = p_->R[i];
    Rt_[i].diagonal().array() += sigma_;
    if (nc_ > 0) {
      const auto gamma = s.gamma.segment(i * nc_, nc_);
      const auto mu = s.mu.segment(i * nc_, nc_);
      Vector d = mu + sigma_ * gamma;
      if ((d.array() <= 0.0).any() || ((gamma + mu).array() <= 0.0).any()) {
        throw FactorizationFailure("invalid jacobian scalars: D must be positive");
      }
      dinv_[i] = d.cwiseInverse();
      cdinv_[i] = gamma.cwiseProduct(dinv_[i]);
      const Matrix Ew = cdinv_[i].asDiagonal() * p_->E[i];
      Qt_[i].noalias() += p_->E[i].transpose() * Ew;
      St_[i].noalias() += p_->L[i].transpose() * Ew;
      Rt_[i].noalias() += p_->L[i].transpose() * (cdinv_[i].asDiagonal() * p_->L[i]);
    }
  }

  // Same retry policy as the dense backend: a roundoff-level diagonal shift
  // rescues positive definite blocks that lost a pivot to cancellation, while
  // genuinely indefinite data still fails.
  auto checked_llt = [](Eigen::LLT<Matrix, Eigen::Lower>& llt, const Matrix& M,
                        const char* what) {
    llt.compute(M);
    if (llt.info() == Eigen::Success) return;
    Matrix shifted = M;
    const double scale = M.rows() > 0 ? M.diagonal().cwiseAbs().maxCoeff() : 1.0;
    double bump = 0.0;
    for (int attempt = 0; attempt < 3; ++attempt) {
      const double next = bump > 0.0 ? bump * 1e3 : 1e-14 * scale;
      shifted.diagonal().array() += next - bump;
      bump = next;
      llt.compute(shifted);
      if (llt.info() == Eigen::Success) return;
    }
    throw FactorizationFailure(std::string("Cholesky failed in stage block: ") + what);
  };

  // Terminal stage: eliminate u_N.
  Rt_llt_N_ = Eigen::LLT<Matrix, Eigen::Lower>();
  checked_llt(Rt_llt_N_, Rt_[N_], "terminal input block");
  P_[N_] = Qt_[N_] - St_[N_].transpose() * Rt_llt_N_.solve(St_[N_]);
  P_[N_] = 0.5 * (P_[N_] + P_[N_].transpose()).eval();

  for (int i = N_ - 1; i >= 0; --i) {
    // Damped cost-to-go: Phat = (I + sigma P)^{-1} P.
    Matrix M = sigma_ * P_[i + 1];
    M.diagonal().array() += 1.0;
    checked_llt(M_llt_[i], M, "dual damping block");
    Phat_[i] = M_llt_[i].solve(P_[i + 1]);
    Phat_[i] = 0.5 * (Phat_[i] + Phat_[i].transpose()).eval();

    const Matrix PhatA = Phat_[i] * p_->A[i];
    const Matrix PhatB = Phat_[i] * p_->B[i];
    Matrix Fuu = Rt_[i];
    Fuu.noalias() += p_->B[i].transpose() * PhatB;
    checked_llt(Fuu_llt_[i], Fuu, "input block");
    Fux_[i] = St_[i];
    Fux_[i].noalias() += p_->B[i].transpose() * PhatA;
    Kgain_[i] = -Fuu_llt_[i].solve(Fux_[i]);

    P_[i] = Qt_[i];
    P_[i].noalias() += p_->A[i].transpose() * PhatA;
    P_[i].noalias() += Fux_[i].transpose() * Kgain_[i];
    P_[i] = 0.5 * (P_[i] + P_[i].transpose()).eval();
  }

  Matrix init = P_[0];
  init.diagonal().array() += 1.0 / sigma_;
  checked_llt(init_llt_, init, "initial-condition block");
  factored_ = true;
}

PrimalDualPoint RiccatiNewtonBackend::solve(const Residual& r) const {
  if (!factored_) throw FactorizationFailure("solve called before factor");
  PrimalDualPoint dx = solve_once(r);
  Residual defect = jacobian_product(ops_, scalars_, dx);
  defect.rz += r.rz;
  defect.rl += r.rl;
  defect.rv += r.rv;
  dx += solve_once(defect);
  return dx;
}

PrimalDualPoint RiccatiNewtonBackend::solve_once(const Residual& r) const {
  // Stage right-hand sides: v1x/v1u = -rz +/- the eliminated dual terms,
  // ct = the dynamics-row residuals.
  std::vector<Vector> v1x(N_ + 1), v1u(N_ + 1);
  for (int i = 0; i <= N_; ++i) {
    v1x[i] = -r.rz.segment(i * ns_, nx_);
    v1u[i] = -r.rz.segment(i * ns_ + nx_, nu_);
    if (nc_ > 0) {
      const Vector w = dinv_[i].cwiseProduct(r.rv.segment(i * nc_, nc_));
      v1x[i].noalias() += p_->E[i].transpose() * w;
      v1u[i].noalias() += p_->L[i].transpose() * w;
    }
  }
  auto ct = [&](int i) { return r.rl.segment(i * nx_, nx_); };

  // Backward pass over the linear terms.
  std::vector<Vector> pvec(N_ + 1), kff(N_);
  pvec[N_] = v1x[N_] - St_[N_].transpose() * Rt_llt_N_.solve(v1u[N_]);
  for (int i = N_ - 1; i >= 0; --i) {
    const Vector phat = M_llt_[i].solve(pvec[i + 1]);
    const Vector hnext = Phat_[i] * ct(i + 1) - phat;
    Vector fu = -v1u[i];
    fu.noalias() += p_->B[i].transpose() * hnext;
    kff[i] = -Fuu_llt_[i].solve(fu);
    Vector fx = -v1x[i];
    fx.noalias() += p_->A[i].transpose() * hnext;
    pvec[i] = -(fx + Fux_[i].transpose() * kff[i]);
  }

  PrimalDualPoint dx;
  dx.z.resize((N_ + 1) * ns_);
  dx.lambda.resize((N_ + 1) * nx_);
  dx.v.resize((N_ + 1) * nc_);

  // Forward pass: initial stage, then propagate through the damped dynamics.
  Vector xi = init_llt_.solve(pvec[0] + ct(0) / sigma_);
  dx.lambda.segment(0, nx_) = (xi - ct(0)) / sigma_;
  for (int i = 0; i < N_; ++i) {
    const Vector ui = Kgain_[i] * xi + kff[i];
    dx.z.segment(i * ns_, nx_) = xi;
    dx.z.segment(i * ns_ + nx_, nu_) = ui;
    Vector sfree = p_->A[i] * xi + p_->B[i] * ui + ct(i + 1);
    Vector xnext = M_llt_[i].solve(sfree + sigma_ * pvec[i + 1]);
    dx.lambda.segment((i + 1) * nx_, nx_) = (xnext - sfree) / sigma_;
    xi = std::move(xnext);
  }
  dx.z.segment(N_ * ns_, nx_) = xi;
  dx.z.segment(N_ * ns_ + nx_, nu_) = Rt_llt_N_.solve(v1u[N_] - St_[N_] * xi);

  if (nc_ > 0) {
    for (int i = 0; i <= N_; ++i) {
      Vector az = p_->E[i] * dx.z.segment(i * ns_, nx_);
      az.noalias() += p_->L[i] * dx.z.segment(i * ns_ + nx_, nu_);
      dx.v.segment(i * nc_, nc_) = cdinv_[i].cwiseProduct(az) -
                                   dinv_[i].cwiseProduct(r.rv.segment(i * nc_, nc_));
    }
  }
  return dx;
}

}  // namespace fbstab
