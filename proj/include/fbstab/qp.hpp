#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fbstab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Convex quadratic program
///
///   min  1/2 z'Hz + f'z
///   s.t. Gz = h,  Az <= b,
///
/// with H symmetric positive semidefinite. Either constraint block may be
/// empty. Positive semidefiniteness is a documented precondition; it is only
/// checked on request (see validate).
struct DenseQP {
  Matrix H;
  Vector f;
  Matrix G;
  Vector h;
  Matrix A;
  Vector b;

  Eigen::Index num_variables() const { return f.size(); }
  Eigen::Index num_equalities() const { return h.size(); }
  Eigen::Index num_inequalities() const { return b.size(); }
};

/// Builds a DenseQP, reshaping empty constraint blocks to 0 x n so that
/// downstream products are well defined.
DenseQP make_dense_qp(Matrix H, Vector f, Matrix G = Matrix(), Vector h = Vector(),
                      Matrix A = Matrix(), Vector b = Vector());

/// Returns one human-readable diagnostic per violated invariant, empty when
/// the data is consistent. With check_curvature set, also verifies that the
/// smallest eigenvalue of H is >= -1e-8.
std::vector<std::string> validate(const DenseQP& p, bool check_curvature = false);

/// Optimal-control QP in multiple-shooting form over horizon N:
///
///   min  sum_{i=0}^{N} 1/2 [x_i;u_i]'[Q_i S_i'; S_i R_i][x_i;u_i] + q_i'x_i + r_i'u_i
///   s.t. x_0 = xi,
///        x_{i+1} = A_i x_i + B_i u_i + c_i,   i = 0..N-1,
///        E_i x_i + L_i u_i + d_i <= 0,        i = 0..N,
///
/// with every stage block [Q S'; S R] symmetric positive semidefinite and
/// stage dimensions constant in i.
struct OcpQP {
  std::vector<Matrix> Q;  // N+1, nx x nx
  std::vector<Matrix> R;  // N+1, nu x nu
  std::vector<Matrix> S;  // N+1, nu x nx
  std::vector<Vector> q;  // N+1, nx
  std::vector<Vector> r;  // N+1, nu
  std::vector<Matrix> A;  // N, nx x nx
  std::vector<Matrix> B;  // N, nx x nu
  std::vector<Vector> c;  // N, nx
  std::vector<Matrix> E;  // N+1, nc x nx
  std::vector<Matrix> L;  // N+1, nc x nu
  std::vector<Vector> d;  // N+1, nc
  Vector xi;              // nx

  int horizon() const { return static_cast<int>(Q.size()) - 1; }
  Eigen::Index num_states() const { return xi.size(); }
  Eigen::Index num_inputs() const { return R.empty() ? 0 : R.front().rows(); }
  Eigen::Index num_stage_constraints() const { return d.empty() ? 0 : d.front().size(); }

  Eigen::Index num_variables() const {
    return (horizon() + 1) * (num_states() + num_inputs());
  }
  Eigen::Index num_equalities() const { return (horizon() + 1) * num_states(); }
  Eigen::Index num_inequalities() const {
    return (horizon() + 1) * num_stage_constraints();
  }
};

std::vector<std::string> validate(const OcpQP& p);

/// Stacks an OcpQP into the general form with decision vector
/// z = (x_0, u_0, ..., x_N, u_N). Equality rows are [x_0 = xi; dynamics rows
/// in stage order]; inequality rows are E_i x_i + L_i u_i <= -d_i in stage
/// order.
DenseQP ocp_to_dense(const OcpQP& p);

/// Eliminates the states by forward propagation, producing an
/// inequality-only QP in the stacked controls (u_0, ..., u_N).
DenseQP condense(const OcpQP& p);

/// Primal-dual triple x = (z, lambda, v). The inequality duals v carry no
/// sign constraint during iteration; v >= 0 holds only at an optimal point.
struct PrimalDualPoint {
  Vector z;
  Vector lambda;
  Vector v;

  static PrimalDualPoint Zero(Eigen::Index n, Eigen::Index m, Eigen::Index q) {
    return {Vector::Zero(n), Vector::Zero(m), Vector::Zero(q)};
  }

  Eigen::Index size() const { return z.size() + lambda.size() + v.size(); }
  double squared_norm() const {
    return z.squaredNorm() + lambda.squaredNorm() + v.squaredNorm();
  }
  double norm() const { return std::sqrt(squared_norm()); }

  PrimalDualPoint& operator+=(const PrimalDualPoint& o) {
    z += o.z;
    lambda += o.lambda;
    v += o.v;
    return *this;
  }
};

inline PrimalDualPoint operator-(const PrimalDualPoint& a, const PrimalDualPoint& b) {
  return {a.z - b.z, a.lambda - b.lambda, a.v - b.v};
}
inline PrimalDualPoint operator+(const PrimalDualPoint& a, const PrimalDualPoint& b) {
  return {a.z + b.z, a.lambda + b.lambda, a.v + b.v};
}
inline PrimalDualPoint operator*(double t, const PrimalDualPoint& a) {
  return {t * a.z, t * a.lambda, t * a.v};
}

/// Concatenates (z, lambda, v) into one vector.
inline Vector stack(const PrimalDualPoint& x) {
  Vector out(x.size());
  out.segment(0, x.z.size()) = x.z;
  out.segment(x.z.size(), x.lambda.size()) = x.lambda;
  out.segment(x.z.size() + x.lambda.size(), x.v.size()) = x.v;
  return out;
}

}  // namespace fbstab
