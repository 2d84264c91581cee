#pragma once

#include "dfh/sets.hpp"

#include <cstddef>

namespace dfh {

/// How the pseudoinverse norm factors of the unit-radius sets are measured.
enum class NormKind {
  spectral,   ///< ||.||_2, the default
  frobenius,  ///< ||.||_F, an upper bound on the spectral norm
};

/// Inputs of the closed-form error bounds.
struct BoundInputs {
  std::size_t m = 0;         ///< columns of S
  std::size_t k = 0;         ///< columns of T
  double L_grad = 0.0;       ///< Lipschitz constant of grad f on the sampling ball
  double L_hess = 0.0;       ///< Lipschitz constant of the Hessian on the sampling ball
  double delta_S = 0.0;      ///< radius of S
  double delta_T = 0.0;      ///< radius of T
  double norm_S_pinv = 1.0;  ///< ||(S_hat^T)^+||
  double norm_T_pinv = 1.0;  ///< ||T_hat^+|| (equal to ||(T_hat^T)^+||)
};

struct NormFactors {
  double S_pinv;  ///< ||(S_hat^T)^+||
  double T_pinv;  ///< ||T_hat^+||
};

/// Pseudoinverse norms of S / radius(S) and T / radius(T).
NormFactors norm_factors(const DirectionSet& S, const DirectionSet& T, NormKind kind = NormKind::spectral);

/// Bound inputs measured from the actual sets.
BoundInputs make_bound_inputs(const DirectionSet& S, const DirectionSet& T, double L_grad, double L_hess,
                              NormKind kind = NormKind::spectral);

/// Simplex-gradient error bound sqrt(k)/2 * L_grad * ||(T_hat^T)^+|| * delta_T.
double error_bound_gsg(const BoundInputs& in);

/// Nested-set Hessian error bound
/// m sqrt(k)/3 * L_hess * (2 delta_u/delta_l + 3) * ||(S_hat^T)^+|| * ||T_hat^+|| * delta_u.
/// Throws std::invalid_argument for a nonpositive radius.
double error_bound_nsh(const BoundInputs& in);

/// Bound for the canonical sets (beta Id, beta E_k): 5/3 n^{3/2} L beta for
/// k = 0 and 11/2 n^2 L beta otherwise. Throws for beta <= 0 or k > n.
double error_bound_canonical(std::size_t n, std::size_t k, double beta, double L_hess);

}  // namespace dfh
