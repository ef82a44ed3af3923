#include "fbstab/ops.hpp"

namespace fbstab {

OcpOps::OcpOps(const OcpQP& p)
    : p_(&p),
      N_(p.horizon()),
      nx_(p.num_states()),
      nu_(p.num_inputs()),
      nc_(p.num_stage_constraints()),
      ns_(nx_ + nu_),
      n_(p.num_variables()),
      m_(p.num_equalities()),
      q_(p.num_inequalities()) {
  f_.resize(n_);
  h_.resize(m_);
  b_.resize(q_);
  for (int i = 0; i <= N_; ++i) {
    f_.segment(i * ns_, nx_) = p.q[i];
    f_.segment(i * ns_ + nx_, nu_) = p.r[i];
    if (nc_ > 0) b_.segment(i * nc_, nc_) = -p.d[i];
  }
  h_.segment(0, nx_) = p.xi;
  for (int i = 0; i < N_; ++i) h_.segment((i + 1) * nx_, nx_) = p.c[i];
}

Vector OcpOps::hess_mul(const Vector& z) const {
  Vector out(n_);
  for (int i = 0; i <= N_; ++i) {
    const auto xi = z.segment(i * ns_, nx_);
    const auto ui = z.segment(i * ns_ + nx_, nu_);
    out.segment(i * ns_, nx_).noalias() = p_->Q[i] * xi;
    out.segment(i * ns_, nx_).noalias() += p_->S[i].transpose() * ui;
    out.segment(i * ns_ + nx_, nu_).noalias() = p_->S[i] * xi;
    out.segment(i * ns_ + nx_, nu_).noalias() += p_->R[i] * ui;
  }
  return out;
}

Vector OcpOps::eq_mul(const Vector& z) const {
  Vector out(m_);
  out.segment(0, nx_) = z.segment(0, nx_);
  for (int i = 0; i < N_; ++i) {
    out.segment((i + 1) * nx_, nx_) = z.segment((i + 1) * ns_, nx_);
    out.segment((i + 1) * nx_, nx_).noalias() -= p_->A[i] * z.segment(i * ns_, nx_);
    out.segment((i + 1) * nx_, nx_).noalias() -= p_->B[i] * z.segment(i * ns_ + nx_, nu_);
  }
  return out;
}

Vector OcpOps::eq_tmul(const Vector& l) const {
  Vector out = Vector::Zero(n_);
  out.segment(0, nx_) = l.segment(0, nx_);
  for (int i = 0; i < N_; ++i) {
    const auto li = l.segment((i + 1) * nx_, nx_);
    out.segment(i * ns_, nx_).noalias() -= p_->A[i].transpose() * li;
    out.segment(i * ns_ + nx_, nu_).noalias() -= p_->B[i].transpose() * li;
    out.segment((i + 1) * ns_, nx_) += li;
  }
  return out;
}

Vector OcpOps::ineq_mul(const Vector& z) const {
  Vector out(q_);
  for (int i = 0; i <= N_ && nc_ > 0; ++i) {
    out.segment(i * nc_, nc_).noalias() = p_->E[i] * z.segment(i * ns_, nx_);
    out.segment(i * nc_, nc_).noalias() += p_->L[i] * z.segment(i * ns_ + nx_, nu_);
  }
  return out;
}

Vector OcpOps::ineq_tmul(const Vector& v) const {
  Vector out = Vector::Zero(n_);
  for (int i = 0; i <= N_ && nc_ > 0; ++i) {
    const auto vi = v.segment(i * nc_, nc_);
    out.segment(i * ns_, nx_).noalias() += p_->E[i].transpose() * vi;
    out.segment(i * ns_ + nx_, nu_).noalias() += p_->L[i].transpose() * vi;
  }
  return out;
}

}  // namespace fbstab
