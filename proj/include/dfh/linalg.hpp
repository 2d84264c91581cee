#pragma once

#include "dfh/types.hpp"

#include <cstddef>

/// Small dense linear-algebra kernel shared by the estimators.
namespace dfh::linalg {

/// True when every entry of `a` is finite.
bool is_finite(const Matrix& a);

/// Moore-Penrose pseudoinverse via singular value decomposition.
///
/// Singular values at or below `cutoff_factor * max(rows, cols) * eps *
/// sigma_max` are treated as zero, so rank-deficient input (including the
/// zero matrix) is handled. Throws std::invalid_argument for empty or
/// non-finite input.
Matrix pseudoinverse(const Matrix& a, const NumericSettings& settings = {});

/// Largest singular value, ||A||_2.
double spectral_norm(const Matrix& a);

/// (sum A_ij^2)^(1/2).
double frobenius_norm(const Matrix& a);

/// Number of singular values strictly greater than tol * sigma_max.
std::size_t rank(const Matrix& a, double tol);

/// Solves A X = B for square nonsingular A using a pivoted LU factorization.
/// Throws SingularMatrixError when rank(A, settings.rank_rel_tol) < rows.
Matrix solve(const Matrix& a, const Matrix& b, const NumericSettings& settings = {});

}  // namespace dfh::linalg
