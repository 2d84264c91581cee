#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>

namespace dfh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Scalar black-box function f : R^n -> R.
using Oracle = std::function<double(const Vector&)>;

/// Library-wide numeric tolerances. Every tolerance is relative to the scale
/// of the object it is applied to.
struct NumericSettings {
  /// Singular values <= factor * max(rows, cols) * eps * sigma_max are
  /// treated as zero by the pseudoinverse.
  double pinv_cutoff_factor = 1.0;
  /// Relative singular-value cutoff used by full-row-rank preconditions.
  double rank_rel_tol = 1e-10;
  /// Two points coincide when their max-norm distance is at most
  /// point_rel_tol * (1 + |x0| + radius_S + radius_T).
  double point_rel_tol = 1e-12;
  /// Relative singular-value cutoff of the scaled quadratic basis matrix.
  double poised_rel_tol = 1e-10;
  /// |g(x0)| at or below this value is treated as a zero denominator.
  double zero_value_tol = 1e-12;
};

}  // namespace dfh
