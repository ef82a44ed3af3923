#include "fbstab/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <limits>

namespace fbstab {

namespace {

// Rows of [G; A_W] stacked with the KKT blocks for active set W.
struct KktCandidate {
  bool consistent = false;
  Vector z, lambda, vW;
};

KktCandidate solve_kkt_subset(const Matrix& H, const Vector& f, const Matrix& G,
                              const Vector& h, const Matrix& A, const Vector& b,
                              const std::vector<int>& W) {
  const Eigen::Index n = f.size(), m = h.size();
  const Eigen::Index w = static_cast<Eigen::Index>(W.size());
  Matrix M = Matrix::Zero(n + m + w, n + m + w);
  Vector rhs(n + m + w);
  M.block(0, 0, n, n) = H;
  rhs.segment(0, n) = -f;
  if (m > 0) {
    M.block(0, n, n, m) = G.transpose();
    M.block(n, 0, m, n) = G;
    rhs.segment(n, m) = h;
  }
  for (Eigen::Index j = 0; j < w; ++j) {
    M.block(0, n + m + j, n, 1) = A.row(W[j]).transpose();
    M.block(n + m + j, 0, 1, n) = A.row(W[j]);
    rhs[n + m + j] = b[W[j]];
  }

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  const Vector s = cod.solve(rhs);
  const double res = (M * s - rhs).lpNorm<Eigen::Infinity>();
  const double scale =
      1.0 + rhs.lpNorm<Eigen::Infinity>() +
      M.cwiseAbs().maxCoeff() * s.lpNorm<Eigen::Infinity>();

  KktCandidate c;
  c.consistent = res <= 1e-9 * scale;
  if (!c.consistent) return c;
  c.z = s.segment(0, n);
  c.lambda = s.segment(n, m);
  c.vW = s.segment(n + m, w);
  return c;
}

bool subset_feasible_point(const Matrix& G, const Vector& h, const Matrix& A,
                           const Vector& b, const std::vector<int>& W, Vector* z_out) {
  const Eigen::Index n = G.cols() > 0 ? G.cols() : A.cols();
  const Eigen::Index m = h.size();
  const Eigen::Index w = static_cast<Eigen::Index>(W.size());
  if (m + w == 0) {
    *z_out = Vector::Zero(n);
  } else {
    Matrix M(m + w, n);
    Vector rhs(m + w);
    if (m > 0) {
      M.block(0, 0, m, n) = G;
      rhs.segment(0, m) = h;
    }
    for (Eigen::Index j = 0; j < w; ++j) {
      M.row(m + j) = A.row(W[j]);
      rhs[m + j] = b[W[j]];
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
    const Vector z = cod.solve(rhs);
    const double res = (M * z - rhs).lpNorm<Eigen::Infinity>();
    const double scale = 1.0 + rhs.lpNorm<Eigen::Infinity>() +
                         M.cwiseAbs().maxCoeff() * z.lpNorm<Eigen::Infinity>();
    if (res > 1e-9 * scale) return false;
    *z_out = z;
  }
  const double zs = 1.0 + z_out->lpNorm<Eigen::Infinity>();
  if (m > 0 && (G * (*z_out) - h).lpNorm<Eigen::Infinity>() > 1e-8 * zs) return false;
  if (b.size() > 0 && ((A * (*z_out) - b).array() > 1e-8 * zs).any()) return false;
  return true;
}

}  // namespace

OracleResult oracle_solve(const DenseQP& p) {
  const Eigen::Index n = p.num_variables();
  const Eigen::Index m = p.num_equalities();
  const Eigen::Index q = p.num_inequalities();
  if (n > 12 || q > 14) {
    throw EnumerationLimit("oracle_solve limited to n <= 12, q <= 14");
  }
  const Matrix H = 0.5 * (p.H + p.H.transpose());

  OracleResult best;
  bool have_candidate = false;
  double best_obj = std::numeric_limits<double>::infinity();

  const unsigned long subsets = 1ul << q;
  for (unsigned long mask = 0; mask < subsets; ++mask) {
    std::vector<int> W;
    for (Eigen::Index i = 0; i < q; ++i) {
      if (mask & (1ul << i)) W.push_back(static_cast<int>(i));
    }
    const KktCandidate c = solve_kkt_subset(H, p.f, p.G, p.h, p.A, p.b, W);
    if (!c.consistent) continue;
    const double zs = 1.0 + c.z.lpNorm<Eigen::Infinity>();
    if (q > 0 && ((p.A * c.z - p.b).array() > 1e-8 * zs).any()) continue;
    const double vs = 1.0 + (c.vW.size() > 0 ? c.vW.lpNorm<Eigen::Infinity>() : 0.0);
    if (c.vW.size() > 0 && c.vW.minCoeff() < -1e-10 * vs) continue;

    const double obj = 0.5 * c.z.dot(H * c.z) + p.f.dot(c.z);
    if (!have_candidate || obj < best_obj) {
      have_candidate = true;
      best_obj = obj;
      best.z = c.z;
      best.lambda = c.lambda;
      best.v = Vector::Zero(q);
      for (std::size_t j = 0; j < W.size(); ++j) best.v[W[j]] = c.vW[j];
      best.active_set = W;
    }
  }

  if (have_candidate) {
    best.status = OracleStatus::Optimal;
    best.objective = best_obj;
    return best;
  }

  // No critical point. Settle feasibility by sweeping the same subsets.
  bool feasible = false;
  Vector zf;
  for (unsigned long mask = 0; mask < subsets && !feasible; ++mask) {
    std::vector<int> W;
    for (Eigen::Index i = 0; i < q; ++i) {
      if (mask & (1ul << i)) W.push_back(static_cast<int>(i));
    }
    feasible = subset_feasible_point(p.G, p.h, p.A, p.b, W, &zf);
  }

  OracleResult out;
  if (!feasible) {
    out.status = OracleStatus::Infeasible;
    return out;
  }

  // Feasible with no critical point: unbounded below. Look for a ray among
  // the near-null eigenvectors of H.
  out.status = OracleStatus::Unbounded;
  const double hscale = std::max(1.0, H.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()[i]) > 1e-10 * hscale) continue;
    for (const double sgn : {1.0, -1.0}) {
      const Vector d = sgn * es.eigenvectors().col(i);
      const bool eq_ok = m == 0 || (p.G * d).lpNorm<Eigen::Infinity>() <= 1e-8;
      const bool in_ok = q == 0 || (p.A * d).maxCoeff() <= 1e-8;
      if (eq_ok && in_ok && p.f.dot(d) < -1e-10) {
        out.ray = d;
        return out;
      }
    }
  }
  return out;
}

}  // namespace fbstab
