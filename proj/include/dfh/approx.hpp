#pragma once

#include "dfh/eval.hpp"
#include "dfh/sets.hpp"
#include "dfh/types.hpp"

#include <cstddef>

namespace dfh {

struct GradientResult {
  Vector gradient;
  double set_radius = 0.0;     ///< radius of T
  std::size_t eval_count = 0;  ///< new distinct oracle calls made by this computation
};

struct HessianResult {
  Matrix hessian;
  double delta_u = 0.0;  ///< max(radius S, radius T)
  double delta_l = 0.0;  ///< min(radius S, radius T)
  std::size_t eval_count = 0;
  bool symmetrized = false;
};

/// [f(x0 + t^j) - f(x0)]_j.
Vector delta_f(const Vector& x0, const DirectionSet& T, EvaluationCache& cache);

/// Generalized simplex gradient (T^T)^+ delta_f(x0; T).
/// Throws RankDeficientError("T", ...) unless T has full row rank.
GradientResult simplex_gradient(const Vector& x0, const DirectionSet& T, EvaluationCache& cache,
                                const NumericSettings& settings = {});

/// Nested-set Hessian (S^T)^+ D where row i of D is the difference of the
/// simplex gradients over T taken at x0 + s^i and at x0.
///
/// The raw matrix is generally asymmetric for non-quadratic f; pass
/// `symmetrize` to get (H + H^T) / 2. Every evaluation goes through `cache`,
/// so overlapping points are computed once. Throws RankDeficientError naming
/// S or T when either lacks full row rank.
HessianResult nested_set_hessian(const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                                 EvaluationCache& cache, bool symmetrize = false,
                                 const NumericSettings& settings = {});

}  // namespace dfh
