#pragma once

#include "dfh/approx.hpp"
#include "dfh/eval.hpp"
#include "dfh/quadmodel.hpp"
#include "dfh/sets.hpp"

#include <cstddef>
#include <optional>

namespace dfh {

/// Which gradient stands in for grad f inside the calculus rules.
enum class CalcMode {
  simplex,    ///< generalized simplex gradient over T
  quadratic,  ///< gradient at x0 of the quadratic interpolating f over the evaluation set
};

enum class CalcRule { product, quotient, power };

/// Per-function ingredients at x0, all drawn from the function's own cache.
struct ComponentEstimate {
  double value = 0.0;  ///< f(x0)
  HessianResult hessian;
  Vector gradient;  ///< the mode's gradient substitute
  std::optional<QuadraticModel> model;
  std::size_t num_points = 0;         ///< distinct points in the evaluation set
  double norm_basis_inverse = 0.0;    ///< ||Q_hat^{-1}||_2, quadratic mode only
};

/// Nested-set Hessian of f plus the mode's gradient substitute. Quadratic mode
/// interpolates over the evaluation set of (x0; S, T) using cached values
/// only, and throws NotPoisedError unless that set is poised.
ComponentEstimate estimate_component(const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                                     EvaluationCache& cache, CalcMode mode, bool symmetrize = false,
                                     const NumericSettings& settings = {});

/// (H_f) g + G_f G_g^T + G_g G_f^T + (H_g) f at x0.
HessianResult product_hessian(EvaluationCache& f, EvaluationCache& g, const Vector& x0, const DirectionSet& S,
                              const DirectionSet& T, CalcMode mode, bool symmetrize = false,
                              const NumericSettings& settings = {});

/// g^{-3} [g (g H_f - f H_g) + 2 f G_g G_g^T - g (G_f G_g^T + G_g G_f^T)] at x0.
/// Throws DivisionByZeroError when |g(x0)| <= settings.zero_value_tol.
HessianResult quotient_hessian(EvaluationCache& f, EvaluationCache& g, const Vector& x0, const DirectionSet& S,
                               const DirectionSet& T, CalcMode mode, bool symmetrize = false,
                               const NumericSettings& settings = {});

/// p f^{p-1} H_f + p (p-1) f^{p-2} G_f G_f^T at x0. Throws for p < 2.
HessianResult power_hessian(EvaluationCache& f, const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                            unsigned p, CalcMode mode, bool symmetrize = false,
                            const NumericSettings& settings = {});

Matrix combine_product(const ComponentEstimate& f, const ComponentEstimate& g);
Matrix combine_quotient(const ComponentEstimate& f, const ComponentEstimate& g);
Matrix combine_power(const ComponentEstimate& f, unsigned p);

// Error bounds

/// Data about one function entering a calculus bound. Quantities left empty
/// are treated as unavailable; E overrides replace the computed constants.
struct FunctionBoundData {
  double value = 0.0;                          ///< f(x0)
  std::optional<double> lipschitz_grad;        ///< L of grad f
  std::optional<double> lipschitz_hess;        ///< L of the Hessian of f
  std::optional<double> true_gradient_norm;    ///< ||grad f(x0)||
  std::optional<double> approx_gradient_norm;  ///< norm of the mode's gradient substitute
  std::optional<double> e_hess;                ///< override for E of the nested-set Hessian
  std::optional<double> e_grad;                ///< override for E of the gradient substitute
};

struct CalculusBoundInputs {
  FunctionBoundData f;
  FunctionBoundData g;  ///< ignored by the power rule
  std::size_t m = 0;
  std::size_t k = 0;
  double delta_S = 0.0;
  double delta_T = 0.0;
  double norm_S_pinv = 1.0;         ///< ||(S_hat^T)^+||
  double norm_T_pinv = 1.0;         ///< ||T_hat^+||
  std::size_t num_points = 0;       ///< interpolation points, quadratic mode
  double norm_basis_inverse = 0.0;  ///< ||Q_hat^{-1}||, quadratic mode
  unsigned power = 2;
};

/// sqrt(k)/2 * L_grad * ||(T_hat^T)^+||; times delta_T it bounds the simplex gradient error.
double e_grad_simplex(std::size_t k, double L_grad, double norm_T_pinv);

/// m sqrt(k)/3 * L_hess * (2 delta_u/delta_l + 3) * ||(S_hat^T)^+|| * ||T_hat^+||.
double e_hess_nested(std::size_t m, std::size_t k, double L_hess, double delta_u, double delta_l,
                     double norm_S_pinv, double norm_T_pinv);

/// 6 (1 + sqrt 2) sqrt(p) L_hess ||Q_hat^{-1}||; times delta_u^2 it bounds the
/// model gradient error.
double e_grad_model(std::size_t num_points, double L_hess, double norm_basis_inverse);

/// Smallest available candidate. Throws std::invalid_argument if none is available.
double candidate_minimum(std::initializer_list<std::optional<double>> candidates);

/// Error bound of a calculus Hessian. Every M-minimum is evaluated over the
/// candidates whose inputs are available. Throws std::invalid_argument when a
/// needed Lipschitz constant is missing or a radius is not positive.
double calculus_error_bound(CalcRule rule, CalcMode mode, const CalculusBoundInputs& in);

}  // namespace dfh
