#pragma once

#include <cmath>

#include "fbstab/ops.hpp"
#include "fbstab/qp.hpp"

namespace fbstab {

/// Parameters of the penalized Fischer-Burmeister function and its
/// generalized gradient: alpha blends the Fischer-Burmeister term with the
/// a+ b+ penalty, zeta is the singular-ball radius for the gradient.
struct PfbParams {
  double alpha = 0.95;
  double zeta = 1e-14;
};

/// phi(a,b) = alpha*(a + b - sqrt(a^2+b^2)) + (1-alpha)*a+ b+.
/// Zero exactly when a >= 0, b >= 0 and ab = 0.
///
/// The Fischer-Burmeister term is evaluated as 2ab/(a+b+r) when a+b > 0,
/// which avoids the cancellation in a+b-r when one argument dominates; the
/// arguments can reach 1/sigma scale on infeasible problems.
inline double pfb(double a, double b, double alpha) {
  const double r = std::hypot(a, b);
  double fb;
  if (r == 0.0) {
    fb = 0.0;
  } else if (a + b > 0.0) {
    fb = 2.0 * (a * b) / ((a + b) + r);
  } else {
    fb = (a + b) - r;
  }
  const double pen = (a > 0.0 && b > 0.0) ? a * b : 0.0;
  return alpha * fb + (1.0 - alpha) * pen;
}

struct PfbGradient {
  double gamma;
  double mu;
};

/// One element of the generalized gradient of phi at (y, v). Inside the
/// zeta-ball the symmetric member eta = zeta = 1/sqrt(2) is selected; on the
/// positive orthant the subgradient of a+ b+ is taken as (v, y).
inline PfbGradient pfb_gradient(double y, double v, const PfbParams& p = {}) {
  const double r = std::hypot(y, v);
  if (r <= p.zeta) {
    const double g = p.alpha * (1.0 - 1.0 / std::sqrt(2.0));
    return {g, g};
  }
  if (y > 0.0 && v > 0.0) {
    return {p.alpha * (1.0 - y / r) + (1.0 - p.alpha) * v,
            p.alpha * (1.0 - v / r) + (1.0 - p.alpha) * y};
  }
  return {p.alpha * (1.0 - y / r), p.alpha * (1.0 - v / r)};
}

/// Diagonal data of one member of the C-subdifferential: the Newton system
/// blocks are C = diag(gamma) and D = diag(mu + sigma*gamma). Invariants:
/// gamma, mu >= 0 and gamma + mu > 0 elementwise, so D is positive definite
/// for any sigma > 0.
struct JacobianScalars {
  Vector gamma;
  Vector mu;
  double sigma = 0.0;
};

inline JacobianScalars compute_scalars(const Vector& y, const Vector& v, double sigma,
                                       const PfbParams& params = {}) {
  JacobianScalars s;
  s.sigma = sigma;
  s.gamma.resize(y.size());
  s.mu.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const PfbGradient g = pfb_gradient(y[i], v[i], params);
    s.gamma[i] = g.gamma;
    s.mu[i] = g.mu;
  }
  return s;
}

/// Residual of the proximal subproblem at x with center xbar:
///   rz = Hz + f + G'lambda + A'v + sigma (z - zbar)
///   rl = h - Gz + sigma (lambda - lambdabar)
///   rv = phi(y, v) elementwise, with y = b - Az + sigma (v - vbar) cached.
struct Residual {
  Vector rz;
  Vector rl;
  Vector rv;
  Vector y;

  double squared_norm() const {
    return rz.squaredNorm() + rl.squaredNorm() + rv.squaredNorm();
  }
  double norm() const { return std::sqrt(squared_norm()); }
};

/// theta = 1/2 ||R||^2, the linesearch merit function.
inline double merit(const Residual& r) { return 0.5 * r.squared_norm(); }

template <class Ops>
Residual compute_residual(const Ops& ops, const PrimalDualPoint& x,
                          const PrimalDualPoint& xbar, double sigma,
                          const PfbParams& params = {}) {
  Residual r;
  r.rz = ops.hess_mul(x.z) + ops.f() + sigma * (x.z - xbar.z);
  if (ops.m() > 0) {
    r.rz += ops.eq_tmul(x.lambda);
    r.rl = ops.h() - ops.eq_mul(x.z) + sigma * (x.lambda - xbar.lambda);
  } else {
    r.rl.resize(0);
  }
  if (ops.q() > 0) {
    r.rz += ops.ineq_tmul(x.v);
    r.y = ops.b() - ops.ineq_mul(x.z) + sigma * (x.v - xbar.v);
    r.rv.resize(ops.q());
    for (Eigen::Index i = 0; i < ops.q(); ++i) {
      r.rv[i] = pfb(r.y[i], x.v[i], params.alpha);
    }
  } else {
    r.y.resize(0);
    r.rv.resize(0);
  }
  return r;
}

/// Natural residual of the original problem, pi(x) = x - P_Gamma(x - F(x))
/// with Gamma = R^n x R^m x R^q_{>=0}; implemented as the projection formula.
/// Its norm is the outer stopping criterion.
template <class Ops>
Vector natural_residual(const Ops& ops, const PrimalDualPoint& x) {
  const Eigen::Index n = ops.n(), m = ops.m(), q = ops.q();
  Vector pi(n + m + q);
  Vector Fz = ops.hess_mul(x.z) + ops.f();
  if (m > 0) Fz += ops.eq_tmul(x.lambda);
  if (q > 0) Fz += ops.ineq_tmul(x.v);
  pi.segment(0, n) = Fz;
  if (m > 0) pi.segment(n, m) = ops.h() - ops.eq_mul(x.z);
  if (q > 0) {
    const Vector Fv = ops.b() - ops.ineq_mul(x.z);
    for (Eigen::Index i = 0; i < q; ++i) {
      pi[n + m + i] = x.v[i] - std::max(0.0, x.v[i] - Fv[i]);
    }
  }
  return pi;
}

/// Subproblem variant of the natural residual: the complementarity block is
/// min(y_i, v_i). Diagnostic only; the solver iterates on phi.
template <class Ops>
Vector natural_residual_inner(const Ops& ops, const PrimalDualPoint& x,
                              const PrimalDualPoint& xbar, double sigma) {
  const Residual r = compute_residual(ops, x, xbar, sigma);
  const Eigen::Index n = ops.n(), m = ops.m(), q = ops.q();
  Vector pi(n + m + q);
  pi.segment(0, n) = r.rz;
  pi.segment(n, m) = r.rl;
  for (Eigen::Index i = 0; i < q; ++i) pi[n + m + i] = std::min(r.y[i], x.v[i]);
  return pi;
}

/// V dx in residual-shaped blocks, for V the C-subdifferential member
/// defined by the scalars. Used for iterative refinement of Newton steps.
template <class Ops>
Residual jacobian_product(const Ops& ops, const JacobianScalars& s,
                          const PrimalDualPoint& dx) {
  Residual out;
  out.rz = ops.hess_mul(dx.z) + s.sigma * dx.z;
  if (ops.m() > 0) {
    out.rz += ops.eq_tmul(dx.lambda);
    out.rl = -ops.eq_mul(dx.z) + s.sigma * dx.lambda;
  } else {
    out.rl.resize(0);
  }
  if (ops.q() > 0) {
    out.rz += ops.ineq_tmul(dx.v);
    out.rv = -s.gamma.cwiseProduct(ops.ineq_mul(dx.z)) +
             (s.mu + s.sigma * s.gamma).cwiseProduct(dx.v);
  } else {
    out.rv.resize(0);
  }
  return out;
}

/// V'R for V the C-subdifferential member defined by the scalars; equals the
/// gradient of the merit function. Stacked as (z, lambda, v) blocks.
template <class Ops>
Vector jacobian_transpose_product(const Ops& ops, const JacobianScalars& s,
                                  const Residual& r) {
  const Eigen::Index n = ops.n(), m = ops.m(), q = ops.q();
  const double sigma = s.sigma;
  Vector out(n + m + q);
  Vector gz = ops.hess_mul(r.rz) + sigma * r.rz;
  if (m > 0) gz -= ops.eq_tmul(r.rl);
  if (q > 0) gz -= ops.ineq_tmul(s.gamma.cwiseProduct(r.rv));
  out.segment(0, n) = gz;
  if (m > 0) out.segment(n, m) = ops.eq_mul(r.rz) + sigma * r.rl;
  if (q > 0) {
    out.segment(n + m, q) =
        ops.ineq_mul(r.rz) + (s.mu + sigma * s.gamma).cwiseProduct(r.rv);
  }
  return out;
}

// DenseQP-level convenience wrappers.
inline Residual residual(const DenseQP& p, const PrimalDualPoint& x,
                         const PrimalDualPoint& xbar, double sigma,
                         const PfbParams& params = {}) {
  return compute_residual(DenseOps(p), x, xbar, sigma, params);
}
inline Vector natural_residual(const DenseQP& p, const PrimalDualPoint& x) {
  return natural_residual(DenseOps(p), x);
}
inline Vector natural_residual_inner(const DenseQP& p, const PrimalDualPoint& x,
                                     const PrimalDualPoint& xbar, double sigma) {
  return natural_residual_inner(DenseOps(p), x, xbar, sigma);
}

}  // namespace fbstab
