#include <doctest.h>

#include "fbstab/models.hpp"
#include "fbstab/oracle.hpp"
#include "fbstab/solver.hpp"
#include "support.hpp"

using namespace fbstab;
using namespace testsupport;

TEST_SUITE("qp_model") {

TEST_CASE("validate accepts a consistent 1-d problem") {
  DenseQP p = make_dense_qp(Matrix::Identity(1, 1), Vector::Zero(1));
  CHECK(validate(p).empty());
}

TEST_CASE("validate flags a non-square Hessian") {
  DenseQP p;
  p.H = Matrix::Zero(1, 2);
  p.H << 1, 0;
  p.f = Vector::Zero(1);
  p.G.resize(0, 1);
  p.h.resize(0);
  p.A.resize(0, 1);
  p.b.resize(0);
  const auto diags = validate(p);
  REQUIRE_FALSE(diags.empty());
  CHECK(diags.front().find("square") != std::string::npos);
}

TEST_CASE("validate flags an antisymmetric Hessian") {
  Matrix H(2, 2);
  H << 0, 1, -1, 0;
  DenseQP p = make_dense_qp(H, Vector::Zero(2));
  const auto diags = validate(p);
  REQUIRE_FALSE(diags.empty());
  CHECK(diags.front().find("symmetric") != std::string::npos);
}

TEST_CASE("validate curvature check warns on indefinite H") {
  Matrix H(2, 2);
  H << 1, 0, 0, -1;
  DenseQP p = make_dense_qp(H, Vector::Zero(2));
  CHECK(validate(p, false).empty());
  CHECK_FALSE(validate(p, true).empty());
}

TEST_CASE("ocp validation flags stage inconsistencies") {
  std::mt19937 rng(9);
  OcpQP p = random_ocp(rng, 3, 2, 1, 1);
  CHECK(validate(p).empty());

  OcpQP bad_count = p;
  bad_count.B.pop_back();
  const auto d1 = validate(bad_count);
  REQUIRE_FALSE(d1.empty());
  CHECK(d1.front().find("B") != std::string::npos);

  OcpQP bad_shape = p;
  bad_shape.Q[1] = Matrix::Zero(3, 3);
  CHECK_FALSE(validate(bad_shape).empty());

  OcpQP asym = p;
  asym.Q[0](0, 1) += 1.0;  // breaks stage-cost symmetry
  CHECK_FALSE(validate(asym).empty());
}

TEST_CASE("ocp_to_dense dimension counts") {
  // Servo-class and spacecraft-class sizes.
  const OcpQP servo = build_servo(30);
  DenseQP d = ocp_to_dense(servo);
  CHECK(d.num_variables() == 155);
  CHECK(d.num_equalities() == 124);
  CHECK(d.num_inequalities() == 124);

  const OcpQP hcw = build_hcw(40);
  d = ocp_to_dense(hcw);
  CHECK(d.num_variables() == 369);
  CHECK(d.num_equalities() == 246);
  CHECK(d.num_inequalities() == 492);
}

TEST_CASE("ocp_to_dense with a degenerate horizon") {
  std::mt19937 rng(11);
  OcpQP p = random_ocp(rng, 0, 1, 1, 0);
  const DenseQP d = ocp_to_dense(p);
  CHECK(d.num_variables() == 2);
  CHECK(d.num_equalities() == 1);  // only x_0 = xi
  CHECK(d.num_inequalities() == 0);
  CHECK(d.G(0, 0) == 1.0);
  CHECK(d.h[0] == p.xi[0]);
}

TEST_CASE("stacked products match the materialized matrices") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int N = 1 + static_cast<int>(rng() % 6);
    const Eigen::Index nx = 1 + rng() % 3, nu = 1 + rng() % 2, nc = rng() % 3;
    const OcpQP p = random_ocp(rng, N, nx, nu, nc);
    const DenseQP d = ocp_to_dense(p);
    const OcpOps ops(p);
    const DenseOps dops(d);
    const Vector z = random_vector(rng, ops.n());
    const Vector l = random_vector(rng, ops.m());
    const Vector v = random_vector(rng, ops.q());
    CHECK((ops.hess_mul(z) - dops.hess_mul(z)).norm() < 1e-12);
    CHECK((ops.eq_mul(z) - dops.eq_mul(z)).norm() < 1e-12);
    CHECK((ops.eq_tmul(l) - dops.eq_tmul(l)).norm() < 1e-12);
    CHECK((ops.ineq_mul(z) - dops.ineq_mul(z)).norm() < 1e-12);
    CHECK((ops.ineq_tmul(v) - dops.ineq_tmul(v)).norm() < 1e-12);
    CHECK((ops.f() - dops.f()).norm() < 1e-14);
    CHECK((ops.h() - dops.h()).norm() < 1e-14);
    CHECK((ops.b() - dops.b()).norm() < 1e-14);
  }
}

TEST_CASE("condense dimensions on the servo model") {
  const DenseQP c = condense(build_servo(30));
  CHECK(c.num_variables() == 31);
  CHECK(c.num_equalities() == 0);
  CHECK(c.num_inequalities() == 124);
}

TEST_CASE("condense at N=0 is direct algebra") {
  std::mt19937 rng(3);
  OcpQP p = random_ocp(rng, 0, 2, 1, 1);
  const DenseQP c = condense(p);
  CHECK(c.num_variables() == 1);
  CHECK((c.H - p.R[0]).norm() < 1e-14);
  const Vector fexp = p.S[0] * p.xi + p.r[0];
  CHECK((c.f - fexp).norm() < 1e-14);
  CHECK((c.A - p.L[0]).norm() < 1e-14);
  const Vector bexp = -p.d[0] - p.E[0] * p.xi;
  CHECK((c.b - bexp).norm() < 1e-14);
}

TEST_CASE("condensed and stacked optimal controls agree") {
  std::mt19937 rng(5);
  SolverOptions opts;
  opts.tau_abs = 1e-10;
  for (int trial = 0; trial < 8; ++trial) {
    const int N = 2 + static_cast<int>(rng() % 9);
    const Eigen::Index nx = 1 + rng() % 3, nu = 1 + rng() % 3;
    const OcpQP p = random_ocp(rng, N, nx, nu, 1, /*cost_rho=*/0.5);
    const DenseQP stacked = ocp_to_dense(p);
    const DenseQP cond = condense(p);
    const SolveResult rs = solve(stacked, opts);
    const SolveResult rc = solve(cond, opts);
    REQUIRE(rs.status == SolveStatus::Optimal);
    REQUIRE(rc.status == SolveStatus::Optimal);
    for (int i = 0; i <= N; ++i) {
      const Vector us = rs.x.z.segment(i * (nx + nu) + nx, nu);
      const Vector uc = rc.x.z.segment(i * nu, nu);
      CHECK((us - uc).lpNorm<Eigen::Infinity>() < 1e-8);
    }
  }
}

TEST_CASE("small condensed problem agrees with the enumeration oracle") {
  std::mt19937 rng(17);
  const OcpQP p = random_ocp(rng, 5, 2, 1, 1, /*cost_rho=*/0.5);
  const DenseQP cond = condense(p);
  const OracleResult oracle = oracle_solve(cond);
  REQUIRE(oracle.status == OracleStatus::Optimal);
  SolverOptions opts;
  opts.tau_abs = 1e-9;
  const SolveResult r = solve(cond, opts);
  REQUIRE(r.status == SolveStatus::Optimal);
  const double obj = 0.5 * r.x.z.dot(cond.H * r.x.z) + cond.f.dot(r.x.z);
  CHECK(obj == doctest::Approx(oracle.objective).epsilon(1e-7));
}

}  // TEST_SUITE
