#pragma once

#include <stdexcept>
#include <vector>

#include "fbstab/qp.hpp"

namespace fbstab {

struct EnumerationLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OracleStatus { Optimal, Infeasible, Unbounded };

struct OracleResult {
  OracleStatus status = OracleStatus::Infeasible;
  Vector z;            // minimizer when Optimal
  double objective = 0.0;
  std::vector<int> active_set;
  Vector lambda;       // equality multipliers when Optimal
  Vector v;            // full inequality multipliers (zeros off the active set)
  Vector ray;          // descent direction when Unbounded and one was found
};

/// Brute-force ground truth by active-set enumeration: every subset W of the
/// inequality rows is tried as the active set, the equality-constrained KKT
/// system is solved by a rank-revealing least-squares factorization, and
/// candidates that are consistent, primal feasible and have W-multipliers
/// >= -1e-10 are kept. No candidate plus a nonempty feasible region means
/// the problem is unbounded below (Frank-Wolfe); an emptiness sweep over the
/// same subsets settles feasibility, since a minimal face of a nonempty
/// polyhedron is the full solution set of its tight rows. Unbounded rays are
/// searched among the near-null eigenvectors of H.
///
/// Requires n <= 12 and q <= 14 (2^q subsets) and H PSD; throws
/// EnumerationLimit when the bounds are exceeded.
OracleResult oracle_solve(const DenseQP& p);

}  // namespace fbstab
