#include "fbstab/feasibility.hpp"

namespace fbstab {

std::optional<Certificate> check_infeasibility(const DenseQP& p, const PrimalDualPoint& dx,
                                               double tau) {
  return check_infeasibility(DenseOps(p), dx, tau);
}

bool verify_dual_certificate(const DenseQP& p, const Vector& dz, double tol) {
  return verify_dual_certificate_metrics(DenseOps(p), dz, tol).valid;
}

bool verify_primal_certificate(const DenseQP& p, const Vector& dlambda, const Vector& dv,
                               double tol) {
  return verify_primal_certificate_metrics(DenseOps(p), dlambda, dv, tol).valid;
}

}  // namespace fbstab
