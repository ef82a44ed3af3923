#pragma once

#include "fbstab/qp.hpp"

namespace fbstab {

/// Matrix-vector products with the KKT data of a DenseQP. The Hessian is
/// symmetrized once on ingestion.
class DenseOps {
 public:
  explicit DenseOps(const DenseQP& p)
      : p_(&p), H_(0.5 * (p.H + p.H.transpose())) {}

  Eigen::Index n() const { return p_->num_variables(); }
  Eigen::Index m() const { return p_->num_equalities(); }
  Eigen::Index q() const { return p_->num_inequalities(); }

  const Matrix& H() const { return H_; }
  const Matrix& G() const { return p_->G; }
  const Matrix& A() const { return p_->A; }
  const Vector& f() const { return p_->f; }
  const Vector& h() const { return p_->h; }
  const Vector& b() const { return p_->b; }

  Vector hess_mul(const Vector& z) const { return H_.selfadjointView<Eigen::Lower>() * z; }
  Vector eq_mul(const Vector& z) const { return p_->G * z; }
  Vector eq_tmul(const Vector& l) const { return p_->G.transpose() * l; }
  Vector ineq_mul(const Vector& z) const { return p_->A * z; }
  Vector ineq_tmul(const Vector& v) const { return p_->A.transpose() * v; }

  const DenseQP& problem() const { return *p_; }

 private:
  const DenseQP* p_;
  Matrix H_;
};

/// The same product surface for an OcpQP in its stacked ordering
/// z = (x_0, u_0, ..., x_N, u_N), lambda = (initial-condition rows,
/// dynamics rows in stage order), v in stage order. None of the stacked
/// matrices are materialized.
class OcpOps {
 public:
  explicit OcpOps(const OcpQP& p);

  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }
  Eigen::Index q() const { return q_; }

  const Vector& f() const { return f_; }
  const Vector& h() const { return h_; }
  const Vector& b() const { return b_; }

  Vector hess_mul(const Vector& z) const;
  Vector eq_mul(const Vector& z) const;
  Vector eq_tmul(const Vector& l) const;
  Vector ineq_mul(const Vector& z) const;
  Vector ineq_tmul(const Vector& v) const;

  const OcpQP& problem() const { return *p_; }

 private:
  const OcpQP* p_;
  int N_;
  Eigen::Index nx_, nu_, nc_, ns_, n_, m_, q_;
  Vector f_, h_, b_;
};

}  // namespace fbstab
