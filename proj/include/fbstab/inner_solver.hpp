#pragma once

#include <algorithm>
#include <deque>
#include <vector>

#include "fbstab/pfb.hpp"

namespace fbstab {

struct InnerOptions {
  double beta = 0.7;             // backtracking factor, in (0,1)
  double eta = 1e-8;             // sufficient-decrease parameter, in (0,0.5)
  int max_iterations = 100;
  int max_linesearch_steps = 60;
  int nonmonotone_window = 10;   // 1 recovers monotone Armijo
};

enum class InnerTermination { ToleranceMet, IterationCap };

struct InnerReport {
  int iterations = 0;
  double final_residual_norm = 0.0;
  int total_linesearch_steps = 0;
  InnerTermination reason = InnerTermination::ToleranceMet;
  bool degraded = false;  // iteration cap hit; best-merit iterate returned
};

/// Per-iteration record, collected only on request.
struct InnerIterationTrace {
  double residual_norm = 0.0;   // ||R|| before the step
  double theta = 0.0;           // merit before the step
  double grad_dot_dx = 0.0;     // (V'R)' dx, equals -||R||^2 for an exact step
  double step = 0.0;            // accepted t
  int linesearch_steps = 0;
  double theta_after = 0.0;
  double residual_norm_after = 0.0;
};

struct LinesearchResult {
  double step = 1.0;
  int trials = 0;
  bool exhausted = false;
};

/// Backtracks over t in {1, beta, beta^2, ...} until
///   theta(x + t dx) <= theta_ref - eta t ||R(x)||^2.
/// theta_ref is theta(x) in monotone mode and the window maximum otherwise.
/// If the trial budget runs out the smallest trial step is returned with the
/// exhausted flag set.
template <class MeritFn>
LinesearchResult linesearch(MeritFn&& theta_at, double theta_ref,
                            double residual_norm_sq, const InnerOptions& opts) {
  LinesearchResult out;
  double t = 1.0;
  for (int k = 0; k < opts.max_linesearch_steps; ++k) {
    ++out.trials;
    if (theta_at(t) <= theta_ref - opts.eta * t * residual_norm_sq) {
      out.step = t;
      return out;
    }
    t *= opts.beta;
  }
  out.step = t / opts.beta;  // smallest trial taken
  out.exhausted = true;
  return out;
}

/// Evaluates the proximal operator: damped semismooth Newton iteration on
/// R(x, xbar, sigma) = 0 starting from xbar, until
///   ||R(x)|| <= eps * min{1, ||x - xbar||},
/// with an entry guard accepting xbar outright when ||R(xbar)|| <= eps
/// (the right-hand side vanishes at x = xbar). On hitting the iteration cap
/// the best-merit iterate seen is returned, flagged as degraded.
template <class Ops, class Backend>
PrimalDualPoint eval_prox(const Ops& ops, Backend& backend, const PrimalDualPoint& xbar,
                          double eps, double sigma, const InnerOptions& opts,
                          const PfbParams& params, InnerReport* report,
                          std::vector<InnerIterationTrace>* trace = nullptr) {
  PrimalDualPoint x = xbar;
  Residual r = compute_residual(ops, x, xbar, sigma, params);
  double rnorm = r.norm();
  InnerReport rep;
  rep.final_residual_norm = rnorm;
  if (rnorm <= eps) {
    if (report) *report = rep;
    return x;
  }

  std::deque<double> window;  // last M accepted merit values
  window.push_back(0.5 * rnorm * rnorm);
  PrimalDualPoint best_x = x;
  double best_theta = window.back();
  int no_progress = 0;  // consecutive iterations without material decrease

  for (int it = 0; it < opts.max_iterations; ++it) {
    const JacobianScalars scalars = compute_scalars(r.y, x.v, sigma, params);
    backend.factor(scalars);
    const PrimalDualPoint dx = backend.solve(r);

    const double theta_ref = *std::max_element(window.begin(), window.end());
    Residual r_trial;
    auto theta_at = [&](double t) {
      r_trial = compute_residual(ops, x + t * dx, xbar, sigma, params);
      return merit(r_trial);
    };
    const LinesearchResult ls = linesearch(theta_at, theta_ref, rnorm * rnorm, opts);
    rep.total_linesearch_steps += ls.trials;

    if (trace) {
      InnerIterationTrace t;
      t.residual_norm = rnorm;
      t.theta = 0.5 * rnorm * rnorm;
      t.grad_dot_dx = jacobian_transpose_product(ops, scalars, r).dot(stack(dx));
      t.step = ls.step;
      t.linesearch_steps = ls.trials;
      trace->push_back(t);
    }

    x += ls.step * dx;
    r = std::move(r_trial);  // residual at the accepted trial point
    rnorm = r.norm();
    const double theta = 0.5 * rnorm * rnorm;
    ++rep.iterations;
    if (trace) {
      trace->back().theta_after = theta;
      trace->back().residual_norm_after = rnorm;
    }

    window.push_back(theta);
    if (static_cast<int>(window.size()) > std::max(1, opts.nonmonotone_window)) {
      window.pop_front();
    }
    if (theta < best_theta * (1.0 - 1e-6)) {
      no_progress = 0;
    } else {
      ++no_progress;
    }
    if (theta < best_theta) {
      best_theta = theta;
      best_x = x;
    }

    const double gap = (x - xbar).norm();
    if (rnorm <= eps * std::min(1.0, gap)) {
      rep.final_residual_norm = rnorm;
      if (report) *report = rep;
      return x;
    }
    // The merit has hit its floating-point floor: the requested tolerance is
    // unreachable and further iterations only add roundoff jitter.
    if (no_progress >= 5) break;
  }

  rep.reason = InnerTermination::IterationCap;
  rep.degraded = true;
  rep.final_residual_norm = std::sqrt(2.0 * best_theta);
  if (report) *report = rep;
  return best_x;
}

}  // namespace fbstab
