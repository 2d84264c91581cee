#pragma once

#include "dfh/eval.hpp"
#include "dfh/sets.hpp"
#include "dfh/types.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace dfh {

/// Q(x) = alpha0 + alpha^T x + x^T H x / 2 with H stored symmetric.
struct QuadraticModel {
  double alpha0 = 0.0;
  Vector alpha;
  Matrix H;

  double value(const Vector& x) const;
};

/// alpha + H x.
Vector model_gradient(const QuadraticModel& q, const Vector& x);

/// Unique quadratic interpolating `values` at `points`.
///
/// Coordinates are centred at `center` (the centroid when omitted) and scaled
/// by the largest distance from it before the linear solve; coefficients are
/// mapped back to the original frame. Throws NotPoisedError when the
/// interpolation matrix is singular under settings.poised_rel_tol, and
/// std::invalid_argument for a wrong point or value count.
QuadraticModel interpolate_general(const PointSet& points, const std::vector<double>& values,
                                   const std::optional<Vector>& center = std::nullopt,
                                   const NumericSettings& settings = {});

/// Closed-form interpolation model over the minimal set built from S and
/// U_k. Every value is drawn through `cache` using the same point
/// expressions as nested_set_hessian(x0, S, build_uk(S, k)), so after that
/// Hessian has been computed no new oracle calls are made. Throws
/// SingularMatrixError when S is singular.
QuadraticModel interpolate_minimal(const Vector& x0, const DirectionSet& S, std::size_t k,
                                   EvaluationCache& cache, const NumericSettings& settings = {});

}  // namespace dfh
