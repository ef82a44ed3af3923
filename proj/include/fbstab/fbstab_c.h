/* C interface to the solver shared library. All functions are thread-safe
 * for distinct handles; a handle must not be used concurrently. Matrices are
 * passed column-major. Functions returning int use 0 for success and a
 * negative fbstab error code otherwise; functions returning pointers return
 * NULL on failure. fbstab_last_error() describes the most recent failure on
 * the calling thread. */
#ifndef FBSTAB_C_H
#define FBSTAB_C_H

#include <stddef.h>

#if defined(_WIN32)
#define FBSTAB_API __declspec(dllexport)
#else
#define FBSTAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* API error codes. */
enum {
  FBSTAB_OK = 0,
  FBSTAB_ERR_ARGUMENT = -1,
  FBSTAB_ERR_DIMENSION = -2,
  FBSTAB_ERR_PARSE = -3,
  FBSTAB_ERR_FACTORIZATION = -4,
  FBSTAB_ERR_IO = -5,
  FBSTAB_ERR_UNSUPPORTED = -6
};

/* Solver termination statuses. */
typedef enum {
  FBSTAB_OPTIMAL = 0,
  FBSTAB_PRIMAL_INFEASIBLE = 1,
  FBSTAB_DUAL_INFEASIBLE = 2,
  FBSTAB_PRIMAL_DUAL_INFEASIBLE = 3,
  FBSTAB_MAX_ITERATIONS = 4,
  FBSTAB_STALLED = 5
} fbstab_term_status;

typedef enum {
  FBSTAB_BACKEND_AUTO = 0,  /* structured backend for OCP inputs, dense otherwise */
  FBSTAB_BACKEND_DENSE = 1,
  FBSTAB_BACKEND_MPC = 2
} fbstab_backend;

typedef struct fbstab_problem_s fbstab_problem;
typedef struct fbstab_result_s fbstab_result;

typedef struct {
  double sigma;              /* proximal regularization, default sqrt(eps) */
  double sigma_scaling;      /* per-outer-iteration multiplier, default 1 */
  double tau_rel;            /* relative stopping tolerance, default 0 */
  double tau_abs;            /* absolute stopping tolerance, default 1e-4 */
  double tau_stall;          /* stall tolerance on the outer step, default 1e-12 */
  double tau_infeas;         /* infeasibility detection tolerance, default 1e-8 */
  double kappa;              /* inexactness decay in (0,1), default 0.1 */
  double alpha;              /* complementarity blend in (0,1), default 0.95 */
  double zeta;               /* gradient singular-ball radius, default 1e-14 */
  double beta;               /* linesearch backtracking factor, default 0.7 */
  double eta;                /* sufficient-decrease parameter, default 1e-8 */
  int max_outer_iterations;  /* default 100 */
  int max_inner_iterations;  /* default 100 */
  int max_linesearch_steps;  /* default 60 */
  int nonmonotone_window;    /* linesearch memory, 1 = monotone, default 10 */
} fbstab_options;

FBSTAB_API fbstab_options fbstab_default_options(void);

/* ---- problems ---- */

FBSTAB_API fbstab_problem* fbstab_problem_create_dense(
    int n, int m, int q, const double* H, const double* f, const double* G,
    const double* h, const double* A, const double* b);

/* Per-stage blocks concatenated stage by stage, each block column-major:
 * Q (N+1 blocks nx*nx), R (N+1, nu*nu), S (N+1, nu*nx), q (N+1, nx),
 * r (N+1, nu), A (N, nx*nx), B (N, nx*nu), c (N, nx), E (N+1, nc*nx),
 * L (N+1, nc*nu), d (N+1, nc), xi (nx). S, q, r, c, E, L, d may be NULL
 * (treated as zero; nc = 0 when E, L and d are all NULL). */
FBSTAB_API fbstab_problem* fbstab_problem_create_ocp(
    int N, int nx, int nu, int nc, const double* Q, const double* R, const double* S,
    const double* q, const double* r, const double* A, const double* B, const double* c,
    const double* E, const double* L, const double* d, const double* xi);

FBSTAB_API fbstab_problem* fbstab_problem_from_json(const char* text);
FBSTAB_API fbstab_problem* fbstab_problem_from_json_file(const char* path);

FBSTAB_API void fbstab_problem_free(fbstab_problem* p);
FBSTAB_API int fbstab_problem_is_ocp(const fbstab_problem* p);
FBSTAB_API int fbstab_problem_dims(const fbstab_problem* p, int* n, int* m, int* q);

/* Writes up to msg_len bytes of newline-separated diagnostics. Returns the
 * number of diagnostics (0 = valid) or a negative error code. */
FBSTAB_API int fbstab_problem_validate(const fbstab_problem* p, int check_curvature,
                                       char* msg, size_t msg_len);

/* Structural conversions; the returned problem is a new handle. */
FBSTAB_API fbstab_problem* fbstab_problem_to_dense(const fbstab_problem* p);
FBSTAB_API fbstab_problem* fbstab_problem_condense(const fbstab_problem* p);

/* Benchmark model builders (OCP problems). */
FBSTAB_API fbstab_problem* fbstab_problem_servo(int horizon);
FBSTAB_API fbstab_problem* fbstab_problem_hcw(int horizon);

/* ---- solving ---- */

/* z0/lambda0/v0 may be NULL for a cold start at the origin. */
FBSTAB_API fbstab_result* fbstab_solve(const fbstab_problem* p, const double* z0,
                                       const double* lambda0, const double* v0,
                                       const fbstab_options* opts, fbstab_backend backend);

FBSTAB_API void fbstab_result_free(fbstab_result* r);
FBSTAB_API fbstab_term_status fbstab_result_status(const fbstab_result* r);
FBSTAB_API const char* fbstab_status_name(fbstab_term_status s);

FBSTAB_API int fbstab_result_primal(const fbstab_result* r, double* z);
FBSTAB_API int fbstab_result_eq_duals(const fbstab_result* r, double* lambda);
FBSTAB_API int fbstab_result_ineq_duals(const fbstab_result* r, double* v);

/* Infeasibility certificate direction; any output may be NULL. Returns
 * FBSTAB_ERR_UNSUPPORTED when the result carries no certificate. */
FBSTAB_API int fbstab_result_certificate(const fbstab_result* r, double* dz,
                                         double* dlambda, double* dv);

FBSTAB_API int fbstab_result_stats(const fbstab_result* r, int* outer_iterations,
                                   long* inner_iterations, double* pi_norm,
                                   double* factor_seconds, double* backsolve_seconds,
                                   double* total_seconds);
FBSTAB_API int fbstab_result_max_inner_per_subproblem(const fbstab_result* r);

/* ---- certificate verification (independent of the solver path) ---- */

/* Returns 1 when valid, 0 when not, negative on error. metrics, when
 * non-NULL, receives 4 doubles: for the dual check
 * (||H dz||_inf, ||G dz||_inf, max(A dz), f'dz) on the normalized direction;
 * for the primal check (||G'dl + A'dv||_inf, h'dl + b'dv+, min dv, 0). */
FBSTAB_API int fbstab_verify_dual_certificate(const fbstab_problem* p, const double* dz,
                                              double tol, double* metrics);
FBSTAB_API int fbstab_verify_primal_certificate(const fbstab_problem* p,
                                                const double* dlambda, const double* dv,
                                                double tol, double* metrics);

/* ---- closed-loop demo ---- */

typedef struct {
  int steps;
  double final_tracking_error;
  double max_input_violation;
  double max_state_violation;
  int max_outer_iterations;
  int max_inner_iterations;
  double median_inner_iterations;
  long total_inner_iterations;
  double max_pi_norm;
  int all_optimal;
  int first_failed_step;  /* -1 when every step solved to optimality */
} fbstab_demo_summary;

/* model is "servo" or "hcw". csv_path may be NULL to skip the trajectory
 * file. Runs the receding-horizon simulation with (optionally) shifted
 * warmstarts and fills the summary. */
FBSTAB_API int fbstab_demo_closed_loop(const char* model, int horizon, int steps,
                                       int warmstart, const fbstab_options* opts,
                                       fbstab_backend backend, const char* csv_path,
                                       fbstab_demo_summary* summary);

/* Most recent error message on this thread. */
FBSTAB_API const char* fbstab_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* FBSTAB_C_H */
