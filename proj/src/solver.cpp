#include "fbstab/solver.hpp"

#include <chrono>

#include "fbstab/newton_dense.hpp"
#include "fbstab/newton_mpc.hpp"

namespace fbstab {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::PrimalDualInfeasible: return "primal_dual_infeasible";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Stalled: return "stalled";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

// Wraps a backend to accumulate factor/solve wall time.
template <class Backend>
class TimedBackend {
 public:
  TimedBackend(Backend& b, SolveStats& stats) : b_(&b), stats_(&stats) {}
  void factor(const JacobianScalars& s) {
    const auto t0 = Clock::now();
    b_->factor(s);
    stats_->factor_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
  }
  PrimalDualPoint solve(const Residual& r) {
    const auto t0 = Clock::now();
    PrimalDualPoint dx = b_->solve(r);
    stats_->backsolve_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    return dx;
  }

 private:
  Backend* b_;
  SolveStats* stats_;
};

template <class Ops, class Backend>
SolveResult run_proximal_loop(const Ops& ops, Backend& backend, PrimalDualPoint x,
                              const SolverOptions& opts) {
  const auto t_start = Clock::now();
  SolveResult out;
  TimedBackend<Backend> timed(backend, out.stats);

  const double eps0 = natural_residual(ops, x).norm();
  out.stats.initial_residual = eps0;
  out.stats.final_residual = eps0;
  const double target = eps0 * opts.tau_rel + opts.tau_abs;
  if (eps0 <= target) {
    out.status = SolveStatus::Optimal;
    out.x = std::move(x);
    out.stats.total_seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
    return out;
  }

  double sigma = opts.sigma;
  double delta = std::min(eps0 / sigma, 1.0);
  out.status = SolveStatus::MaxIterations;

  for (int k = 0; k < opts.max_outer_iterations; ++k) {
    delta *= opts.kappa;
    const double inner_tol = delta * sigma;

    OuterIterationTrace tr;
    InnerReport rep;
    std::vector<InnerIterationTrace> inner_trace;
    PrimalDualPoint xp =
        eval_prox(ops, timed, x, inner_tol, sigma, opts.inner, opts.pfb, &rep,
                  opts.collect_trace ? &inner_trace : nullptr);

    const PrimalDualPoint dx = xp - x;
    out.stats.outer_iterations = k + 1;
    out.stats.total_inner_iterations += rep.iterations;
    out.stats.max_inner_iterations = std::max(out.stats.max_inner_iterations, rep.iterations);

    auto cert = check_infeasibility(ops, dx, opts.tau_infeas);

    x = std::move(xp);
    const double eps = natural_residual(ops, x).norm();
    out.stats.final_residual = eps;

    if (opts.collect_trace) {
      tr.delta = delta;
      tr.inner_tolerance = inner_tol;
      tr.inner_iterations = rep.iterations;
      tr.step_norm = dx.norm();
      tr.inner_residual = rep.final_residual_norm;
      tr.natural_residual = eps;
      tr.inner_degraded = rep.degraded;
      tr.inner = std::move(inner_trace);
      if (opts.collect_iterates) tr.iterate = x;
      out.stats.outer.push_back(std::move(tr));
    }

    if (cert) {
      switch (cert->kind) {
        case CertificateKind::DualInfeasible:
          out.status = SolveStatus::DualInfeasible;
          break;
        case CertificateKind::PrimalInfeasible:
          out.status = SolveStatus::PrimalInfeasible;
          break;
        case CertificateKind::PrimalDualInfeasible:
          out.status = SolveStatus::PrimalDualInfeasible;
          break;
      }
      out.certificate = std::move(cert);
      break;
    }
    if (eps <= target) {
      out.status = SolveStatus::Optimal;
      break;
    }
    if (dx.norm() <= opts.tau_stall) {
      out.status = SolveStatus::Stalled;
      break;
    }
    sigma *= opts.sigma_scaling;
  }

  out.x = std::move(x);
  out.stats.total_seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
  return out;
}

}  // namespace

SolveResult solve(const DenseQP& p, const PrimalDualPoint& x0, const SolverOptions& opts) {
  DenseOps ops(p);
  DenseNewtonBackend backend(ops);
  return run_proximal_loop(ops, backend, x0, opts);
}

SolveResult solve(const DenseQP& p, const SolverOptions& opts) {
  return solve(p, PrimalDualPoint::Zero(p.num_variables(), p.num_equalities(),
                                        p.num_inequalities()),
               opts);
}

SolveResult solve(const OcpQP& p, const PrimalDualPoint& x0, const SolverOptions& opts,
                  Backend backend) {
  if (backend == Backend::Dense) {
    const DenseQP stacked = ocp_to_dense(p);
    return solve(stacked, x0, opts);
  }
  OcpOps ops(p);
  RiccatiNewtonBackend riccati(p);
  return run_proximal_loop(ops, riccati, x0, opts);
}

SolveResult solve(const OcpQP& p, const SolverOptions& opts, Backend backend) {
  return solve(p, PrimalDualPoint::Zero(p.num_variables(), p.num_equalities(),
                                        p.num_inequalities()),
               opts, backend);
}

}  // namespace fbstab
