#include <doctest.h>

#include <chrono>

#include "fbstab/models.hpp"
#include "fbstab/newton_dense.hpp"
#include "fbstab/newton_mpc.hpp"
#include "fbstab/oracle.hpp"
#include "fbstab/solver.hpp"
#include "support.hpp"

using namespace fbstab;
using namespace testsupport;

namespace {

// Runs one factor+solve through both backends on the stacked ordering and
// returns the relative disagreement.
double backend_gap(const OcpQP& p, const JacobianScalars& s, std::mt19937& rng) {
  const DenseQP stacked = ocp_to_dense(p);
  const DenseOps dops(stacked);
  DenseNewtonBackend dense(dops);
  dense.factor(s);
  RiccatiNewtonBackend riccati(p);
  riccati.factor(s);

  Residual r;
  r.rz = random_vector(rng, dops.n());
  r.rl = random_vector(rng, dops.m());
  r.rv = random_vector(rng, dops.q());
  const PrimalDualPoint dd = dense.solve(r);
  const PrimalDualPoint dm = riccati.solve(r);
  return (stack(dm) - stack(dd)).norm() / (1.0 + stack(dd).norm());
}

}  // namespace

TEST_SUITE("newton_mpc") {

TEST_CASE("single-stage horizon matches the dense backend") {
  std::mt19937 rng(10);
  const OcpQP p = random_ocp(rng, 0, 2, 1, 0);
  JacobianScalars s;
  s.sigma = 0.5;
  s.gamma.resize(0);
  s.mu.resize(0);
  CHECK(backend_gap(p, s, rng) < 1e-12);
}

TEST_CASE("zero residual gives a zero step") {
  std::mt19937 rng(11);
  const OcpQP p = random_ocp(rng, 4, 2, 1, 2);
  RiccatiNewtonBackend backend(p);
  backend.factor(random_scalars(rng, p.num_inequalities(), 1e-4));
  Residual r;
  r.rz = Vector::Zero(p.num_variables());
  r.rl = Vector::Zero(p.num_equalities());
  r.rv = Vector::Zero(p.num_inequalities());
  const PrimalDualPoint dx = backend.solve(r);
  CHECK(stack(dx).norm() < 1e-14);
}

TEST_CASE("matches the dense backend on 200 random problems") {
  std::mt19937 rng(2025);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int N = 1 + static_cast<int>(rng() % 20);
    const Eigen::Index nx = 1 + rng() % 5, nu = 1 + rng() % 3, nc = rng() % 5;
    const OcpQP p = random_ocp(rng, N, nx, nu, nc, trial % 3 ? 1e-2 : 0.0);
    const double sigma = std::pow(10.0, -(double)(rng() % 9));
    const JacobianScalars s = random_scalars(rng, p.num_inequalities(), sigma);
    const double gap = backend_gap(p, s, rng);
    worst = std::max(worst, gap);
    CHECK(gap <= 1e-8);
  }
  MESSAGE("worst backend gap: ", worst);
}

TEST_CASE("matches the dense backend on the servo problem") {
  std::mt19937 rng(5150);
  const OcpQP p = build_servo(30);
  const JacobianScalars s = random_scalars(rng, p.num_inequalities(), 1.5e-8);
  CHECK(backend_gap(p, s, rng) <= 1e-8);
}

TEST_CASE("matches the dense backend on the spacecraft problem") {
  std::mt19937 rng(5151);
  const OcpQP p = build_hcw(40);
  const JacobianScalars s = random_scalars(rng, p.num_inequalities(), 1.5e-8);
  CHECK(backend_gap(p, s, rng) <= 1e-6);
}

TEST_CASE("full structured solves match the enumeration oracle") {
  std::mt19937 rng(606);
  SolverOptions opts;
  opts.tau_abs = 1e-8;
  for (int trial = 0; trial < 20; ++trial) {
    const OcpQP p = random_ocp(rng, 2, 1, 1, 1 + rng() % 2, 0.3);
    const DenseQP stacked = ocp_to_dense(p);
    const OracleResult oracle = oracle_solve(stacked);
    REQUIRE(oracle.status == OracleStatus::Optimal);
    const SolveResult r = solve(p, opts, Backend::Mpc);
    REQUIRE(r.status == SolveStatus::Optimal);
    const Matrix H = 0.5 * (stacked.H + stacked.H.transpose());
    const double obj = 0.5 * r.x.z.dot(H * r.x.z) + stacked.f.dot(r.x.z);
    CHECK(std::abs(obj - oracle.objective) <= 1e-7 * (1.0 + std::abs(oracle.objective)));
  }
}

TEST_CASE("factor cost scales linearly in the horizon") {
  // Doubling N should about double factor+solve time; allow generous slack
  // and only require the trend (quadratic growth would triple the ratios).
  std::mt19937 rng(77);
  auto time_point = [&](int N) {
    const OcpQP p = build_servo(N);
    RiccatiNewtonBackend backend(p);
    const JacobianScalars s = random_scalars(rng, p.num_inequalities(), 1.5e-8);
    Residual r;
    r.rz = random_vector(rng, p.num_variables());
    r.rl = random_vector(rng, p.num_equalities());
    r.rv = random_vector(rng, p.num_inequalities());
    const auto t0 = std::chrono::steady_clock::now();
    int reps = 0;
    double elapsed = 0.0;
    while (elapsed < 0.05 && reps < 200) {
      backend.factor(s);
      (void)backend.solve(r);
      ++reps;
      elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return elapsed / reps;
  };
  const double t100 = time_point(100);
  const double t400 = time_point(400);
  CHECK(t400 / t100 < 4.0 * 2.5);  // linear predicts 4x
}

}  // TEST_SUITE
