#include "dfh/bounds.hpp"

#include "dfh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfh {

namespace {

double pinv_norm(const Matrix& a, NormKind kind) {
  const Matrix pinv = linalg::pseudoinverse(a);
  return kind == NormKind::spectral ? linalg::spectral_norm(pinv) : linalg::frobenius_norm(pinv);
}

void check_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
}

}  // namespace

NormFactors norm_factors(const DirectionSet& S, const DirectionSet& T, NormKind kind) {
  return {pinv_norm(S.normalized().transpose(), kind), pinv_norm(T.normalized(), kind)};
}

BoundInputs make_bound_inputs(const DirectionSet& S, const DirectionSet& T, double L_grad, double L_hess,
                              NormKind kind) {
  const NormFactors nf = norm_factors(S, T, kind);
  return {S.size(), T.size(), L_grad, L_hess, S.radius(), T.radius(), nf.S_pinv, nf.T_pinv};
}

double error_bound_gsg(const BoundInputs& in) {
  check_nonnegative(in.L_grad, "L_grad");
  check_nonnegative(in.norm_T_pinv, "norm_T_pinv");
  check_nonnegative(in.delta_T, "delta_T");
  return std::sqrt(static_cast<double>(in.k)) / 2.0 * in.L_grad * in.norm_T_pinv * in.delta_T;
}

double error_bound_nsh(const BoundInputs& in) {
  check_nonnegative(in.L_hess, "L_hess");
  check_nonnegative(in.norm_S_pinv, "norm_S_pinv");
  check_nonnegative(in.norm_T_pinv, "norm_T_pinv");
  const double delta_u = std::max(in.delta_S, in.delta_T);
  const double delta_l = std::min(in.delta_S, in.delta_T);
  if (!(delta_l > 0.0) || !std::isfinite(delta_u)) {
    throw std::invalid_argument("error_bound_nsh: set radii must be positive");
  }
  const double ratio_term = (delta_u == delta_l) ? 5.0 : 2.0 * delta_u / delta_l + 3.0;
  return static_cast<double>(in.m) * std::sqrt(static_cast<double>(in.k)) / 3.0 * in.L_hess * ratio_term *
         in.norm_S_pinv * in.norm_T_pinv * delta_u;
}

double error_bound_canonical(std::size_t n, std::size_t k, double beta, double L_hess) {
  if (n == 0) throw std::invalid_argument("error_bound_canonical: n must be positive");
  if (k > n) throw std::invalid_argument("error_bound_canonical: k must lie in {0, ..., n}");
  if (!(beta > 0.0)) throw std::invalid_argument("error_bound_canonical: beta must be positive");
  check_nonnegative(L_hess, "L_hess");
  const auto dn = static_cast<double>(n);
  if (k == 0) return 5.0 / 3.0 * dn * std::sqrt(dn) * L_hess * beta;
  return 11.0 / 2.0 * dn * dn * L_hess * beta;
}

}  // namespace dfh
