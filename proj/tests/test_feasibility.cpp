#include <doctest.h>

#include "fbstab/feasibility.hpp"
#include "fbstab/solver.hpp"
#include "support.hpp"

using namespace fbstab;
using namespace testsupport;

TEST_SUITE("feasibility") {

TEST_CASE("zero direction carries no information") {
  const DenseQP p = parametric_qp(0, 0, -1, std::nullopt);
  const PrimalDualPoint dx = PrimalDualPoint::Zero(2, 0, 4);
  CHECK_FALSE(check_infeasibility(p, dx, 1e-8).has_value());
}

TEST_CASE("hand-checked dual direction") {
  const DenseQP p = parametric_qp(0, 0, -1, std::nullopt);
  PrimalDualPoint dx = PrimalDualPoint::Zero(2, 0, 4);
  dx.z << 0, 1;  // H dz = 0, f'dz = -1 < 0, A dz <= 0
  const auto cert = check_infeasibility(p, dx, 1e-8);
  REQUIRE(cert.has_value());
  CHECK(cert->kind == CertificateKind::DualInfeasible);
}

TEST_CASE("hand-checked primal direction on conflicting bounds") {
  const DenseQP p = parametric_qp(0, 0, 0, 0.0);  // 1 <= x2 <= 0
  PrimalDualPoint dx = PrimalDualPoint::Zero(2, 0, 5);
  dx.v[3] = 1.0;  // -x2 <= -1 row
  dx.v[4] = 1.0;  // x2 <= 0 row
  const auto cert = check_infeasibility(p, dx, 1e-8);
  REQUIRE(cert.has_value());
  CHECK(cert->kind == CertificateKind::PrimalInfeasible);
  CHECK(verify_primal_certificate(p, dx.lambda, dx.v, 1e-8));
}

TEST_CASE("dual verifier accepts and rejects directions") {
  const DenseQP p = parametric_qp(0, 0, -1, std::nullopt);
  Vector dz(2);
  SUBCASE("zero is not a certificate") {
    dz << 0, 0;
    CHECK_FALSE(verify_dual_certificate(p, dz, 1e-8));
  }
  SUBCASE("the descent ray verifies") {
    dz << 0, 1;
    CHECK(verify_dual_certificate(p, dz, 1e-8));
  }
  SUBCASE("the wrong sign fails the descent test") {
    dz << 1, 0;  // f'dz = 1 > 0
    CHECK_FALSE(verify_dual_certificate(p, dz, 1e-8));
  }
}

TEST_CASE("primal verifier accepts and rejects pairs") {
  const DenseQP p = parametric_qp(0, 0, 0, 0.0);
  SUBCASE("zero pair rejected") {
    CHECK_FALSE(verify_primal_certificate(p, Vector::Zero(0), Vector::Zero(5), 1e-8));
  }
  SUBCASE("the conflicting-bounds pair verifies") {
    Vector dv = Vector::Zero(5);
    dv[3] = 1.0;
    dv[4] = 1.0;
    CHECK(verify_primal_certificate(p, Vector::Zero(0), dv, 1e-8));
  }
  SUBCASE("a positive farkas value fails") {
    // Mass on the x1 box rows: A'dv = 0 but h'dl + b'dv = 3 - 1 = 2 > 0.
    Vector dv = Vector::Zero(5);
    dv[1] = 1.0;  // -x1 <= -1 contributes -1
    dv[2] = 1.0;  // x1 <= 3 contributes 3... b'dv = -1 + 3 = 2 > 0
    CHECK_FALSE(verify_primal_certificate(p, Vector::Zero(0), dv, 1e-8));
  }
}

TEST_CASE("emitted certificates re-verify at a loosened tolerance") {
  std::mt19937 rng(404);
  for (int trial = 0; trial < 25; ++trial) {
    const bool primal = trial % 2 == 0;
    const DenseQP p = primal ? random_primal_infeasible_qp(rng, 2 + rng() % 4, rng() % 4)
                             : random_dual_infeasible_qp(rng, 2 + rng() % 4, 1 + rng() % 5);
    const SolveResult r = solve(p);
    REQUIRE(r.certificate.has_value());
    if (primal) {
      CHECK(verify_primal_certificate(p, r.certificate->dlambda, r.certificate->dv, 1e-7));
    } else {
      CHECK(verify_dual_certificate(p, r.certificate->dz, 1e-7));
    }
  }
}

}  // TEST_SUITE
