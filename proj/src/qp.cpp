#include "fbstab/qp.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>

namespace fbstab {

namespace {

std::string shape_of(const Matrix& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

}  // namespace

DenseQP make_dense_qp(Matrix H, Vector f, Matrix G, Vector h, Matrix A, Vector b) {
  const Eigen::Index n = f.size();
  if (G.size() == 0) G.resize(0, n);
  if (A.size() == 0) A.resize(0, n);
  if (h.size() == 0) h.resize(0);
  if (b.size() == 0) b.resize(0);
  return DenseQP{std::move(H), std::move(f), std::move(G), std::move(h),
                 std::move(A), std::move(b)};
}

std::vector<std::string> validate(const DenseQP& p, bool check_curvature) {
  std::vector<std::string> out;
  const Eigen::Index n = p.f.size();
  if (p.H.rows() != p.H.cols()) {
    out.push_back("H must be square, got " + shape_of(p.H));
  }
  if (p.H.rows() != n) {
    out.push_back("H has " + std::to_string(p.H.rows()) + " rows but f has " +
                  std::to_string(n) + " entries");
  }
  if (p.G.rows() != p.h.size()) {
    out.push_back("G has " + std::to_string(p.G.rows()) + " rows but h has " +
                  std::to_string(p.h.size()) + " entries");
  }
  if (p.G.rows() > 0 && p.G.cols() != n) {
    out.push_back("G must have " + std::to_string(n) + " columns, got " + shape_of(p.G));
  }
  if (p.A.rows() != p.b.size()) {
    out.push_back("A has " + std::to_string(p.A.rows()) + " rows but b has " +
                  std::to_string(p.b.size()) + " entries");
  }
  if (p.A.rows() > 0 && p.A.cols() != n) {
    out.push_back("A must have " + std::to_string(n) + " columns, got " + shape_of(p.A));
  }
  if (p.H.rows() == p.H.cols() && p.H.rows() == n && n > 0) {
    const double scale = std::max(1.0, p.H.cwiseAbs().maxCoeff());
    const double asym = (p.H - p.H.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
      out.push_back("H is not symmetric: max |H - H'| = " + std::to_string(asym));
    }
    if (check_curvature) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (p.H + p.H.transpose()),
                                               Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues().minCoeff();
      if (lmin < -1e-8) {
        out.push_back("H has negative curvature: min eigenvalue = " +
                      std::to_string(lmin));
      }
    }
  }
  return out;
}

std::vector<std::string> validate(const OcpQP& p) {
  std::vector<std::string> out;
  const std::size_t stages = p.Q.size();
  if (stages == 0) {
    out.push_back("horizon data is empty: Q must have N+1 >= 1 stages");
    return out;
  }
  const Eigen::Index nx = p.xi.size();
  const Eigen::Index nu = p.R.front().rows();
  const Eigen::Index nc = p.d.empty() ? 0 : p.d.front().size();

  auto check_count = [&](const char* name, std::size_t got, std::size_t want) {
    if (got != want) {
      out.push_back(std::string(name) + " has " + std::to_string(got) +
                    " stages, expected " + std::to_string(want));
    }
  };
  check_count("R", p.R.size(), stages);
  check_count("S", p.S.size(), stages);
  check_count("q", p.q.size(), stages);
  check_count("r", p.r.size(), stages);
  check_count("A", p.A.size(), stages - 1);
  check_count("B", p.B.size(), stages - 1);
  check_count("c", p.c.size(), stages - 1);
  check_count("E", p.E.size(), stages);
  check_count("L", p.L.size(), stages);
  check_count("d", p.d.size(), stages);
  if (!out.empty()) return out;

  for (std::size_t i = 0; i < stages; ++i) {
    if (p.Q[i].rows() != nx || p.Q[i].cols() != nx)
      out.push_back("Q[" + std::to_string(i) + "] must be " + std::to_string(nx) +
                    "x" + std::to_string(nx));
    if (p.R[i].rows() != nu || p.R[i].cols() != nu)
      out.push_back("R[" + std::to_string(i) + "] must be " + std::to_string(nu) +
                    "x" + std::to_string(nu));
    if (p.S[i].rows() != nu || p.S[i].cols() != nx)
      out.push_back("S[" + std::to_string(i) + "] must be " + std::to_string(nu) +
                    "x" + std::to_string(nx));
    if (p.q[i].size() != nx) out.push_back("q[" + std::to_string(i) + "] size mismatch");
    if (p.r[i].size() != nu) out.push_back("r[" + std::to_string(i) + "] size mismatch");
    if (p.E[i].rows() != nc || (nc > 0 && p.E[i].cols() != nx))
      out.push_back("E[" + std::to_string(i) + "] must be " + std::to_string(nc) +
                    "x" + std::to_string(nx));
    if (p.L[i].rows() != nc || (nc > 0 && p.L[i].cols() != nu))
      out.push_back("L[" + std::to_string(i) + "] must be " + std::to_string(nc) +
                    "x" + std::to_string(nu));
    if (p.d[i].size() != nc) out.push_back("d[" + std::to_string(i) + "] size mismatch");

    // Stage cost block [Q S'; S R] must be symmetric.
    if (p.Q[i].rows() == nx && p.Q[i].cols() == nx) {
      const double scale =
          std::max({1.0, p.Q[i].cwiseAbs().maxCoeff(),
                    p.R[i].size() > 0 ? p.R[i].cwiseAbs().maxCoeff() : 0.0});
      const double asym =
          std::max((p.Q[i] - p.Q[i].transpose()).cwiseAbs().maxCoeff(),
                   p.R[i].size() > 0
                       ? (p.R[i] - p.R[i].transpose()).cwiseAbs().maxCoeff()
                       : 0.0);
      if (asym > 1e-12 * scale) {
        out.push_back("stage " + std::to_string(i) + " cost block is not symmetric");
      }
    }
  }
  for (std::size_t i = 0; i + 1 < stages; ++i) {
    if (p.A[i].rows() != nx || p.A[i].cols() != nx)
      out.push_back("A[" + std::to_string(i) + "] must be " + std::to_string(nx) +
                    "x" + std::to_string(nx));
    if (p.B[i].rows() != nx || p.B[i].cols() != nu)
      out.push_back("B[" + std::to_string(i) + "] must be " + std::to_string(nx) +
                    "x" + std::to_string(nu));
    if (p.c[i].size() != nx) out.push_back("c[" + std::to_string(i) + "] size mismatch");
  }
  return out;
}

DenseQP ocp_to_dense(const OcpQP& p) {
  const int N = p.horizon();
  const Eigen::Index nx = p.num_states();
  const Eigen::Index nu = p.num_inputs();
  const Eigen::Index nc = p.num_stage_constraints();
  const Eigen::Index ns = nx + nu;
  const Eigen::Index n = (N + 1) * ns;
  const Eigen::Index m = (N + 1) * nx;
  const Eigen::Index q = (N + 1) * nc;

  Matrix H = Matrix::Zero(n, n);
  Vector f(n);
  Matrix G = Matrix::Zero(m, n);
  Vector h(m);
  Matrix A = Matrix::Zero(q, n);
  Vector b(q);

  for (int i = 0; i <= N; ++i) {
    const Eigen::Index zx = i * ns;      // x_i offset in z
    const Eigen::Index zu = zx + nx;     // u_i offset in z
    H.block(zx, zx, nx, nx) = p.Q[i];
    H.block(zu, zx, nu, nx) = p.S[i];
    H.block(zx, zu, nx, nu) = p.S[i].transpose();
    H.block(zu, zu, nu, nu) = p.R[i];
    f.segment(zx, nx) = p.q[i];
    f.segment(zu, nu) = p.r[i];
    if (nc > 0) {
      A.block(i * nc, zx, nc, nx) = p.E[i];
      A.block(i * nc, zu, nc, nu) = p.L[i];
      b.segment(i * nc, nc) = -p.d[i];
    }
  }
  // Initial condition x_0 = xi, then the dynamics rows.
  G.block(0, 0, nx, nx) = Matrix::Identity(nx, nx);
  h.segment(0, nx) = p.xi;
  for (int i = 0; i < N; ++i) {
    const Eigen::Index row = (i + 1) * nx;
    G.block(row, i * ns, nx, nx) = -p.A[i];
    G.block(row, i * ns + nx, nx, nu) = -p.B[i];
    G.block(row, (i + 1) * ns, nx, nx) = Matrix::Identity(nx, nx);
    h.segment(row, nx) = p.c[i];
  }
  return DenseQP{std::move(H), std::move(f), std::move(G), std::move(h),
                 std::move(A), std::move(b)};
}

DenseQP condense(const OcpQP& p) {
  const int N = p.horizon();
  const Eigen::Index nx = p.num_states();
  const Eigen::Index nu = p.num_inputs();
  const Eigen::Index nc = p.num_stage_constraints();
  const Eigen::Index nU = (N + 1) * nu;
  const Eigen::Index nX = (N + 1) * nx;

  // X = M U + m0 with X the stacked states under forward propagation.
  Matrix M = Matrix::Zero(nX, nU);
  Vector m0(nX);
  m0.segment(0, nx) = p.xi;
  for (int i = 0; i < N; ++i) {
    const Eigen::Index ri = i * nx, rn = (i + 1) * nx;
    m0.segment(rn, nx) = p.A[i] * m0.segment(ri, nx) + p.c[i];
    M.block(rn, 0, nx, nU) = p.A[i] * M.block(ri, 0, nx, nU);
    M.block(rn, i * nu, nx, nu) += p.B[i];
  }

  Matrix Qbar = Matrix::Zero(nX, nX);
  Matrix Sbar = Matrix::Zero(nU, nX);
  Matrix Rbar = Matrix::Zero(nU, nU);
  Vector qbar(nX), rbar(nU);
  for (int i = 0; i <= N; ++i) {
    Qbar.block(i * nx, i * nx, nx, nx) = p.Q[i];
    Sbar.block(i * nu, i * nx, nu, nx) = p.S[i];
    Rbar.block(i * nu, i * nu, nu, nu) = p.R[i];
    qbar.segment(i * nx, nx) = p.q[i];
    rbar.segment(i * nu, nu) = p.r[i];
  }

  Matrix H = M.transpose() * Qbar * M + Sbar * M + M.transpose() * Sbar.transpose() + Rbar;
  H = 0.5 * (H + H.transpose());
  Vector f = M.transpose() * (Qbar * m0 + qbar) + Sbar * m0 + rbar;

  Matrix A((N + 1) * nc, nU);
  Vector b((N + 1) * nc);
  A.setZero();
  for (int i = 0; i <= N; ++i) {
    if (nc == 0) break;
    A.block(i * nc, 0, nc, nU) = p.E[i] * M.block(i * nx, 0, nx, nU);
    A.block(i * nc, i * nu, nc, nu) += p.L[i];
    b.segment(i * nc, nc) = -p.d[i] - p.E[i] * m0.segment(i * nx, nx);
  }
  return make_dense_qp(std::move(H), std::move(f), Matrix(), Vector(), std::move(A),
                       std::move(b));
}

}  // namespace fbstab
