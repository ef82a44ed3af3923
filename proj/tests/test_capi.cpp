#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fbstab/fbstab_c.h"

namespace {

// Column-major data for the degenerate 2-d box problem:
// min 1/2 x1^2 + x1 + c x2, rows (0,0), -x1<=-1, x1<=3, -x2<=-1 [, x2<=ub].
struct TestProblem {
  std::vector<double> H{1, 0, 0, 0};
  std::vector<double> f;
  std::vector<double> A;
  std::vector<double> b;
  TestProblem(double c, bool with_ub, double ub) {
    f = {1, c};
    if (with_ub) {
      A = {0, -1, 1, 0, 0, /*col2*/ 0, 0, 0, -1, 1};
      b = {0, -1, 3, -1, ub};
    } else {
      A = {0, -1, 1, 0, /*col2*/ 0, 0, 0, -1};
      b = {0, -1, 3, -1};
    }
  }
  int q() const { return static_cast<int>(b.size()); }
};

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("dense create, solve, and accessors") {
  TestProblem t(0.0, true, 3.0);
  fbstab_problem* p = fbstab_problem_create_dense(2, 0, t.q(), t.H.data(), t.f.data(),
                                                  nullptr, nullptr, t.A.data(), t.b.data());
  REQUIRE(p != nullptr);
  CHECK(fbstab_problem_is_ocp(p) == 0);
  int n = 0, m = 0, q = 0;
  CHECK(fbstab_problem_dims(p, &n, &m, &q) == FBSTAB_OK);
  CHECK(n == 2);
  CHECK(m == 0);
  CHECK(q == 5);
  CHECK(fbstab_problem_validate(p, 0, nullptr, 0) == 0);

  fbstab_result* r = fbstab_solve(p, nullptr, nullptr, nullptr, nullptr,
                                  FBSTAB_BACKEND_AUTO);
  REQUIRE(r != nullptr);
  CHECK(fbstab_result_status(r) == FBSTAB_OPTIMAL);
  double z[2];
  CHECK(fbstab_result_primal(r, z) == FBSTAB_OK);
  CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(z[1] == doctest::Approx(1.0).epsilon(1e-4));
  double v[5];
  CHECK(fbstab_result_ineq_duals(r, v) == FBSTAB_OK);
  CHECK(v[1] == doctest::Approx(2.0).epsilon(1e-3));
  int outer = 0;
  long inner = 0;
  double pi = 0, tf = 0, tb = 0, tt = 0;
  CHECK(fbstab_result_stats(r, &outer, &inner, &pi, &tf, &tb, &tt) == FBSTAB_OK);
  CHECK(outer >= 1);
  CHECK(pi <= 1e-4);
  CHECK(fbstab_result_certificate(r, nullptr, nullptr, nullptr) == FBSTAB_ERR_UNSUPPORTED);
  fbstab_result_free(r);
  fbstab_problem_free(p);
}

TEST_CASE("infeasible statuses surface certificates through the C surface") {
  TestProblem t(-1.0, false, 0.0);
  fbstab_problem* p = fbstab_problem_create_dense(2, 0, t.q(), t.H.data(), t.f.data(),
                                                  nullptr, nullptr, t.A.data(), t.b.data());
  REQUIRE(p != nullptr);
  fbstab_result* r = fbstab_solve(p, nullptr, nullptr, nullptr, nullptr,
                                  FBSTAB_BACKEND_AUTO);
  REQUIRE(r != nullptr);
  CHECK(fbstab_result_status(r) == FBSTAB_DUAL_INFEASIBLE);
  std::vector<double> dz(2), dv(4);
  CHECK(fbstab_result_certificate(r, dz.data(), nullptr, dv.data()) == FBSTAB_OK);
  double metrics[4];
  CHECK(fbstab_verify_dual_certificate(p, dz.data(), 1e-8, metrics) == 1);
  CHECK(metrics[3] < 0.0);  // f'dz
  fbstab_result_free(r);
  fbstab_problem_free(p);
}

TEST_CASE("json loading and structural conversions") {
  const char* text =
      "{\"dense\": {\"H\": [[1,0],[0,1]], \"f\": [0,0], \"A\": [[1,0]], \"b\": [1]}}";
  fbstab_problem* p = fbstab_problem_from_json(text);
  REQUIRE(p != nullptr);
  int n, m, q;
  fbstab_problem_dims(p, &n, &m, &q);
  CHECK(n == 2);
  CHECK(q == 1);
  fbstab_problem_free(p);

  CHECK(fbstab_problem_from_json("{\"dense\": {\"f\": [0]}}") == nullptr);
  CHECK(std::string(fbstab_last_error()).find("H") != std::string::npos);
}

TEST_CASE("ocp create and backend selection") {
  fbstab_problem* servo = fbstab_problem_servo(30);
  REQUIRE(servo != nullptr);
  CHECK(fbstab_problem_is_ocp(servo) == 1);
  int n, m, q;
  fbstab_problem_dims(servo, &n, &m, &q);
  CHECK(n == 155);
  CHECK(m == 124);
  CHECK(q == 124);

  fbstab_result* r_mpc = fbstab_solve(servo, nullptr, nullptr, nullptr, nullptr,
                                      FBSTAB_BACKEND_AUTO);
  fbstab_result* r_dense = fbstab_solve(servo, nullptr, nullptr, nullptr, nullptr,
                                        FBSTAB_BACKEND_DENSE);
  REQUIRE(r_mpc != nullptr);
  REQUIRE(r_dense != nullptr);
  CHECK(fbstab_result_status(r_mpc) == FBSTAB_OPTIMAL);
  CHECK(fbstab_result_status(r_dense) == FBSTAB_OPTIMAL);
  std::vector<double> za(n), zb(n);
  fbstab_result_primal(r_mpc, za.data());
  fbstab_result_primal(r_dense, zb.data());
  for (int i = 0; i < n; ++i) CHECK(za[i] == doctest::Approx(zb[i]).epsilon(1e-6));
  fbstab_result_free(r_mpc);
  fbstab_result_free(r_dense);

  fbstab_problem* stacked = fbstab_problem_to_dense(servo);
  REQUIRE(stacked != nullptr);
  CHECK(fbstab_problem_is_ocp(stacked) == 0);
  fbstab_problem* cond = fbstab_problem_condense(servo);
  REQUIRE(cond != nullptr);
  fbstab_problem_dims(cond, &n, &m, &q);
  CHECK(n == 31);
  CHECK(q == 124);
  fbstab_problem_free(cond);
  fbstab_problem_free(stacked);
  fbstab_problem_free(servo);

  // The structured backend rejects dense inputs.
  TestProblem t(0.0, true, 3.0);
  fbstab_problem* pd = fbstab_problem_create_dense(2, 0, t.q(), t.H.data(), t.f.data(),
                                                   nullptr, nullptr, t.A.data(), t.b.data());
  CHECK(fbstab_solve(pd, nullptr, nullptr, nullptr, nullptr, FBSTAB_BACKEND_MPC) ==
        nullptr);
  fbstab_problem_free(pd);
}

TEST_CASE("closed-loop demo runs and writes a csv") {
  fbstab_options opts = fbstab_default_options();
  fbstab_demo_summary summary;
  const char* path = "capi_demo.csv";
  const int rc = fbstab_demo_closed_loop("servo", 10, 5, 1, &opts, FBSTAB_BACKEND_AUTO,
                                         path, &summary);
  CHECK(rc == FBSTAB_OK);
  CHECK(summary.steps == 5);
  CHECK(summary.all_optimal == 1);
  CHECK(summary.first_failed_step == -1);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("step,t,", 0) == 0);
  in.close();
  std::remove(path);
}

TEST_CASE("validate reports diagnostics through the message buffer") {
  // Antisymmetric Hessian: one diagnostic naming the symmetry violation.
  std::vector<double> H{0, -1, 1, 0};
  std::vector<double> f{0, 0};
  fbstab_problem* p = fbstab_problem_create_dense(2, 0, 0, H.data(), f.data(), nullptr,
                                                  nullptr, nullptr, nullptr);
  REQUIRE(p != nullptr);
  char msg[256] = {0};
  const int count = fbstab_problem_validate(p, 0, msg, sizeof(msg));
  CHECK(count == 1);
  CHECK(std::string(msg).find("symmetric") != std::string::npos);
  fbstab_problem_free(p);
}

TEST_CASE("default options round-trip the documented values") {
  const fbstab_options o = fbstab_default_options();
  CHECK(o.sigma == doctest::Approx(1.490116119384766e-8));
  CHECK(o.tau_abs == 1e-4);
  CHECK(o.tau_rel == 0.0);
  CHECK(o.tau_infeas == 1e-8);
  CHECK(o.kappa == 0.1);
  CHECK(o.alpha == 0.95);
  CHECK(o.beta == 0.7);
  CHECK(o.eta == 1e-8);
  CHECK(o.max_outer_iterations == 100);
  CHECK(o.nonmonotone_window == 10);
}

}  // TEST_SUITE
