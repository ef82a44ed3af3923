#include "fbstab/fbstab_c.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <variant>

#include "fbstab/feasibility.hpp"
#include "fbstab/json_io.hpp"
#include "fbstab/models.hpp"
#include "fbstab/solver.hpp"

using namespace fbstab;

struct fbstab_problem_s {
  std::variant<DenseQP, OcpQP> data;
  bool is_ocp() const { return std::holds_alternative<OcpQP>(data); }
  const DenseQP& dense() const { return std::get<DenseQP>(data); }
  const OcpQP& ocp() const { return std::get<OcpQP>(data); }
};

struct fbstab_result_s {
  SolveResult res;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <class Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    set_error(e.what());
    return decltype(fn()){};
  }
}

Eigen::Map<const Matrix> map_matrix(const double* p, int rows, int cols) {
  return Eigen::Map<const Matrix>(p, rows, cols);
}

SolverOptions convert(const fbstab_options* o) {
  SolverOptions s;
  if (!o) return s;
  s.sigma = o->sigma;
  s.sigma_scaling = o->sigma_scaling;
  s.tau_rel = o->tau_rel;
  s.tau_abs = o->tau_abs;
  s.tau_stall = o->tau_stall;
  s.tau_infeas = o->tau_infeas;
  s.kappa = o->kappa;
  s.pfb.alpha = o->alpha;
  s.pfb.zeta = o->zeta;
  s.inner.beta = o->beta;
  s.inner.eta = o->eta;
  s.max_outer_iterations = o->max_outer_iterations;
  s.inner.max_iterations = o->max_inner_iterations;
  s.inner.max_linesearch_steps = o->max_linesearch_steps;
  s.inner.nonmonotone_window = o->nonmonotone_window;
  return s;
}

void problem_dims(const fbstab_problem_s& p, Eigen::Index* n, Eigen::Index* m,
                  Eigen::Index* q) {
  if (p.is_ocp()) {
    *n = p.ocp().num_variables();
    *m = p.ocp().num_equalities();
    *q = p.ocp().num_inequalities();
  } else {
    *n = p.dense().num_variables();
    *m = p.dense().num_equalities();
    *q = p.dense().num_inequalities();
  }
}

void copy_metrics(const DualCertificateMetrics& m, double* out) {
  out[0] = m.hz_inf;
  out[1] = m.gz_inf;
  out[2] = m.az_max;
  out[3] = m.f_dz;
}

void copy_metrics(const PrimalCertificateMetrics& m, double* out) {
  out[0] = m.gtat_inf;
  out[1] = m.farkas;
  out[2] = m.dv_min;
  out[3] = 0.0;
}

template <class Fn>
int verify_with(const fbstab_problem* p, double* metrics, Fn&& fn) {
  if (!p) return FBSTAB_ERR_ARGUMENT;
  try {
    if (p->is_ocp()) {
      const auto m = fn(OcpOps(p->ocp()));
      if (metrics) copy_metrics(m, metrics);
      return m.valid ? 1 : 0;
    }
    const auto m = fn(DenseOps(p->dense()));
    if (metrics) copy_metrics(m, metrics);
    return m.valid ? 1 : 0;
  } catch (const std::exception& e) {
    set_error(e.what());
    return FBSTAB_ERR_ARGUMENT;
  }
}

}  // namespace

extern "C" {

fbstab_options fbstab_default_options(void) {
  const SolverOptions s;
  fbstab_options o;
  o.sigma = s.sigma;
  o.sigma_scaling = s.sigma_scaling;
  o.tau_rel = s.tau_rel;
  o.tau_abs = s.tau_abs;
  o.tau_stall = s.tau_stall;
  o.tau_infeas = s.tau_infeas;
  o.kappa = s.kappa;
  o.alpha = s.pfb.alpha;
  o.zeta = s.pfb.zeta;
  o.beta = s.inner.beta;
  o.eta = s.inner.eta;
  o.max_outer_iterations = s.max_outer_iterations;
  o.max_inner_iterations = s.inner.max_iterations;
  o.max_linesearch_steps = s.inner.max_linesearch_steps;
  o.nonmonotone_window = s.inner.nonmonotone_window;
  return o;
}

fbstab_problem* fbstab_problem_create_dense(int n, int m, int q, const double* H,
                                            const double* f, const double* G,
                                            const double* h, const double* A,
                                            const double* b) {
  return guarded([&]() -> fbstab_problem* {
    if (n <= 0 || m < 0 || q < 0 || !H || !f || (m > 0 && (!G || !h)) ||
        (q > 0 && (!A || !b))) {
      set_error("invalid dense problem arguments");
      return nullptr;
    }
    DenseQP p = make_dense_qp(map_matrix(H, n, n), Eigen::Map<const Vector>(f, n),
                              m > 0 ? Matrix(map_matrix(G, m, n)) : Matrix(),
                              m > 0 ? Vector(Eigen::Map<const Vector>(h, m)) : Vector(),
                              q > 0 ? Matrix(map_matrix(A, q, n)) : Matrix(),
                              q > 0 ? Vector(Eigen::Map<const Vector>(b, q)) : Vector());
    return new fbstab_problem_s{std::move(p)};
  });
}

fbstab_problem* fbstab_problem_create_ocp(int N, int nx, int nu, int nc, const double* Q,
                                          const double* R, const double* S,
                                          const double* q, const double* r,
                                          const double* A, const double* B,
                                          const double* c, const double* E,
                                          const double* L, const double* d,
                                          const double* xi) {
  return guarded([&]() -> fbstab_problem* {
    if (N < 0 || nx <= 0 || nu <= 0 || nc < 0 || !Q || !R || !xi ||
        (N > 0 && (!A || !B)) || (nc > 0 && !E && !L && !d)) {
      set_error("invalid ocp problem arguments");
      return nullptr;
    }
    OcpQP p;
    for (int i = 0; i <= N; ++i) {
      p.Q.push_back(map_matrix(Q + i * nx * nx, nx, nx));
      p.R.push_back(map_matrix(R + i * nu * nu, nu, nu));
      p.S.push_back(S ? Matrix(map_matrix(S + i * nu * nx, nu, nx))
                      : Matrix(Matrix::Zero(nu, nx)));
      p.q.push_back(q ? Vector(Eigen::Map<const Vector>(q + i * nx, nx))
                      : Vector(Vector::Zero(nx)));
      p.r.push_back(r ? Vector(Eigen::Map<const Vector>(r + i * nu, nu))
                      : Vector(Vector::Zero(nu)));
      p.E.push_back(E ? Matrix(map_matrix(E + i * nc * nx, nc, nx))
                      : Matrix(Matrix::Zero(nc, nx)));
      p.L.push_back(L ? Matrix(map_matrix(L + i * nc * nu, nc, nu))
                      : Matrix(Matrix::Zero(nc, nu)));
      p.d.push_back(d ? Vector(Eigen::Map<const Vector>(d + i * nc, nc))
                      : Vector(Vector::Zero(nc)));
    }
    for (int i = 0; i < N; ++i) {
      p.A.push_back(map_matrix(A + i * nx * nx, nx, nx));
      p.B.push_back(map_matrix(B + i * nx * nu, nx, nu));
      p.c.push_back(c ? Vector(Eigen::Map<const Vector>(c + i * nx, nx))
                      : Vector(Vector::Zero(nx)));
    }
    p.xi = Eigen::Map<const Vector>(xi, nx);
    const auto diags = validate(p);
    if (!diags.empty()) {
      set_error(diags.front());
      return nullptr;
    }
    return new fbstab_problem_s{std::move(p)};
  });
}

fbstab_problem* fbstab_problem_from_json(const char* text) {
  return guarded([&]() -> fbstab_problem* {
    if (!text) {
      set_error("null JSON text");
      return nullptr;
    }
    ParsedProblem parsed = parse_problem_json(text);
    return std::visit(
        [](auto&& p) { return new fbstab_problem_s{std::move(p)}; }, std::move(parsed));
  });
}

fbstab_problem* fbstab_problem_from_json_file(const char* path) {
  return guarded([&]() -> fbstab_problem* {
    if (!path) {
      set_error("null path");
      return nullptr;
    }
    std::ifstream in(path);
    if (!in) {
      set_error(std::string("cannot open ") + path);
      return nullptr;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return fbstab_problem_from_json(buf.str().c_str());
  });
}

void fbstab_problem_free(fbstab_problem* p) { delete p; }

int fbstab_problem_is_ocp(const fbstab_problem* p) { return p && p->is_ocp() ? 1 : 0; }

int fbstab_problem_dims(const fbstab_problem* p, int* n, int* m, int* q) {
  if (!p) return FBSTAB_ERR_ARGUMENT;
  Eigen::Index nn, mm, qq;
  problem_dims(*p, &nn, &mm, &qq);
  if (n) *n = static_cast<int>(nn);
  if (m) *m = static_cast<int>(mm);
  if (q) *q = static_cast<int>(qq);
  return FBSTAB_OK;
}

int fbstab_problem_validate(const fbstab_problem* p, int check_curvature, char* msg,
                            size_t msg_len) {
  if (!p) return FBSTAB_ERR_ARGUMENT;
  std::vector<std::string> diags =
      p->is_ocp() ? validate(p->ocp())
                  : validate(p->dense(), check_curvature != 0);
  if (msg && msg_len > 0) {
    std::string joined;
    for (const auto& d : diags) {
      if (!joined.empty()) joined += "\n";
      joined += d;
    }
    std::strncpy(msg, joined.c_str(), msg_len - 1);
    msg[msg_len - 1] = '\0';
  }
  return static_cast<int>(diags.size());
}

fbstab_problem* fbstab_problem_to_dense(const fbstab_problem* p) {
  return guarded([&]() -> fbstab_problem* {
    if (!p) {
      set_error("null problem");
      return nullptr;
    }
    if (!p->is_ocp()) return new fbstab_problem_s{p->dense()};
    return new fbstab_problem_s{ocp_to_dense(p->ocp())};
  });
}

fbstab_problem* fbstab_problem_condense(const fbstab_problem* p) {
  return guarded([&]() -> fbstab_problem* {
    if (!p || !p->is_ocp()) {
      set_error("condense requires an OCP problem");
      return nullptr;
    }
    return new fbstab_problem_s{condense(p->ocp())};
  });
}

fbstab_problem* fbstab_problem_servo(int horizon) {
  return guarded([&]() -> fbstab_problem* {
    if (horizon < 1) {
      set_error("horizon must be >= 1");
      return nullptr;
    }
    return new fbstab_problem_s{build_servo(horizon)};
  });
}

fbstab_problem* fbstab_problem_hcw(int horizon) {
  return guarded([&]() -> fbstab_problem* {
    if (horizon < 1) {
      set_error("horizon must be >= 1");
      return nullptr;
    }
    return new fbstab_problem_s{build_hcw(horizon)};
  });
}

fbstab_result* fbstab_solve(const fbstab_problem* p, const double* z0,
                            const double* lambda0, const double* v0,
                            const fbstab_options* opts, fbstab_backend backend) {
  return guarded([&]() -> fbstab_result* {
    if (!p) {
      set_error("null problem");
      return nullptr;
    }
    Eigen::Index n, m, q;
    problem_dims(*p, &n, &m, &q);
    PrimalDualPoint x0 = PrimalDualPoint::Zero(n, m, q);
    if (z0) x0.z = Eigen::Map<const Vector>(z0, n);
    if (lambda0) x0.lambda = Eigen::Map<const Vector>(lambda0, m);
    if (v0) x0.v = Eigen::Map<const Vector>(v0, q);
    const SolverOptions sopts = convert(opts);

    SolveResult res;
    if (p->is_ocp()) {
      const Backend be = backend == FBSTAB_BACKEND_DENSE ? Backend::Dense : Backend::Mpc;
      res = solve(p->ocp(), x0, sopts, be);
    } else {
      if (backend == FBSTAB_BACKEND_MPC) {
        set_error("the structured backend requires an OCP problem");
        return nullptr;
      }
      res = solve(p->dense(), x0, sopts);
    }
    return new fbstab_result_s{std::move(res)};
  });
}

void fbstab_result_free(fbstab_result* r) { delete r; }

fbstab_term_status fbstab_result_status(const fbstab_result* r) {
  if (!r) return FBSTAB_MAX_ITERATIONS;
  switch (r->res.status) {
    case SolveStatus::Optimal: return FBSTAB_OPTIMAL;
    case SolveStatus::PrimalInfeasible: return FBSTAB_PRIMAL_INFEASIBLE;
    case SolveStatus::DualInfeasible: return FBSTAB_DUAL_INFEASIBLE;
    case SolveStatus::PrimalDualInfeasible: return FBSTAB_PRIMAL_DUAL_INFEASIBLE;
    case SolveStatus::MaxIterations: return FBSTAB_MAX_ITERATIONS;
    case SolveStatus::Stalled: return FBSTAB_STALLED;
  }
  return FBSTAB_MAX_ITERATIONS;
}

const char* fbstab_status_name(fbstab_term_status s) {
  switch (s) {
    case FBSTAB_OPTIMAL: return "optimal";
    case FBSTAB_PRIMAL_INFEASIBLE: return "primal_infeasible";
    case FBSTAB_DUAL_INFEASIBLE: return "dual_infeasible";
    case FBSTAB_PRIMAL_DUAL_INFEASIBLE: return "primal_dual_infeasible";
    case FBSTAB_MAX_ITERATIONS: return "max_iterations";
    case FBSTAB_STALLED: return "stalled";
  }
  return "unknown";
}

int fbstab_result_primal(const fbstab_result* r, double* z) {
  if (!r || !z) return FBSTAB_ERR_ARGUMENT;
  Eigen::Map<Vector>(z, r->res.x.z.size()) = r->res.x.z;
  return FBSTAB_OK;
}

int fbstab_result_eq_duals(const fbstab_result* r, double* lambda) {
  if (!r || !lambda) return FBSTAB_ERR_ARGUMENT;
  Eigen::Map<Vector>(lambda, r->res.x.lambda.size()) = r->res.x.lambda;
  return FBSTAB_OK;
}

int fbstab_result_ineq_duals(const fbstab_result* r, double* v) {
  if (!r || !v) return FBSTAB_ERR_ARGUMENT;
  Eigen::Map<Vector>(v, r->res.x.v.size()) = r->res.x.v;
  return FBSTAB_OK;
}

int fbstab_result_certificate(const fbstab_result* r, double* dz, double* dlambda,
                              double* dv) {
  if (!r) return FBSTAB_ERR_ARGUMENT;
  if (!r->res.certificate) return FBSTAB_ERR_UNSUPPORTED;
  const Certificate& c = *r->res.certificate;
  if (dz) Eigen::Map<Vector>(dz, c.dz.size()) = c.dz;
  if (dlambda) Eigen::Map<Vector>(dlambda, c.dlambda.size()) = c.dlambda;
  if (dv) Eigen::Map<Vector>(dv, c.dv.size()) = c.dv;
  return FBSTAB_OK;
}

int fbstab_result_stats(const fbstab_result* r, int* outer_iterations,
                        long* inner_iterations, double* pi_norm, double* factor_seconds,
                        double* backsolve_seconds, double* total_seconds) {
  if (!r) return FBSTAB_ERR_ARGUMENT;
  const SolveStats& s = r->res.stats;
  if (outer_iterations) *outer_iterations = s.outer_iterations;
  if (inner_iterations) *inner_iterations = s.total_inner_iterations;
  if (pi_norm) *pi_norm = s.final_residual;
  if (factor_seconds) *factor_seconds = s.factor_seconds;
  if (backsolve_seconds) *backsolve_seconds = s.backsolve_seconds;
  if (total_seconds) *total_seconds = s.total_seconds;
  return FBSTAB_OK;
}

int fbstab_result_max_inner_per_subproblem(const fbstab_result* r) {
  if (!r) return FBSTAB_ERR_ARGUMENT;
  return r->res.stats.max_inner_iterations;
}

int fbstab_verify_dual_certificate(const fbstab_problem* p, const double* dz, double tol,
                                   double* metrics) {
  if (!dz) return FBSTAB_ERR_ARGUMENT;
  return verify_with(p, metrics, [&](const auto& ops) {
    const Vector d = Eigen::Map<const Vector>(dz, ops.n());
    return verify_dual_certificate_metrics(ops, d, tol);
  });
}

int fbstab_verify_primal_certificate(const fbstab_problem* p, const double* dlambda,
                                     const double* dv, double tol, double* metrics) {
  if (!dlambda && !dv) return FBSTAB_ERR_ARGUMENT;
  return verify_with(p, metrics, [&](const auto& ops) {
    const Vector dl = dlambda ? Vector(Eigen::Map<const Vector>(dlambda, ops.m()))
                              : Vector(Vector::Zero(ops.m()));
    const Vector dvv = dv ? Vector(Eigen::Map<const Vector>(dv, ops.q()))
                          : Vector(Vector::Zero(ops.q()));
    return verify_primal_certificate_metrics(ops, dl, dvv, tol);
  });
}

int fbstab_demo_closed_loop(const char* model, int horizon, int steps, int warmstart,
                            const fbstab_options* opts, fbstab_backend backend,
                            const char* csv_path, fbstab_demo_summary* summary) {
  try {
    const std::string name = model ? model : "";
    if ((name != "servo" && name != "hcw") || horizon < 1 || steps < 1) {
      set_error("model must be servo or hcw with horizon, steps >= 1");
      return FBSTAB_ERR_ARGUMENT;
    }
    ClosedLoopOptions clopts;
    clopts.steps = steps;
    clopts.warmstart = warmstart != 0;
    clopts.solver = convert(opts);
    clopts.backend = backend == FBSTAB_BACKEND_DENSE ? Backend::Dense : Backend::Mpc;

    const OcpQP p = name == "servo" ? build_servo(horizon) : build_hcw(horizon);
    const double Ts = name == "servo" ? 0.05 : 30.0;
    const ClosedLoopLog log = closed_loop_sim(p, clopts);
    if (csv_path) {
      std::ofstream out(csv_path);
      if (!out) {
        set_error(std::string("cannot open ") + csv_path);
        return FBSTAB_ERR_IO;
      }
      write_trajectory_csv(log, Ts, out);
    }
    const DemoSummary s = name == "servo" ? summarize_servo(log) : summarize_hcw(log);
    if (summary) {
      summary->steps = s.steps;
      summary->final_tracking_error = s.final_tracking_error;
      summary->max_input_violation = s.max_input_violation;
      summary->max_state_violation = s.max_state_violation;
      summary->max_outer_iterations = s.max_outer_iterations;
      summary->max_inner_iterations = s.max_inner_iterations;
      summary->median_inner_iterations = s.median_inner_iterations;
      summary->total_inner_iterations = s.total_inner_iterations;
      summary->max_pi_norm = s.max_pi_norm;
      summary->all_optimal = s.all_optimal ? 1 : 0;
      summary->first_failed_step = -1;
      for (const auto& e : log.steps) {
        if (e.status != SolveStatus::Optimal) {
          summary->first_failed_step = e.step;
          break;
        }
      }
    }
    return FBSTAB_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return FBSTAB_ERR_FACTORIZATION;
  }
}

const char* fbstab_last_error(void) { return g_last_error.c_str(); }

}  // extern "C"
