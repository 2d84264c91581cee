#include "dfh/quadmodel.hpp"

#include "dfh/errors.hpp"
#include "dfh/linalg.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dfh {

double QuadraticModel::value(const Vector& x) const { return alpha0 + alpha.dot(x) + 0.5 * x.dot(H * x); }

Vector model_gradient(const QuadraticModel& q, const Vector& x) { return q.alpha + q.H * x; }

QuadraticModel interpolate_general(const PointSet& points, const std::vector<double>& values,
                                   const std::optional<Vector>& center, const NumericSettings& settings) {
  const std::size_t n = points.dim();
  const std::size_t p = quadratic_basis_size(n);
  if (points.size() != p) {
    throw std::invalid_argument("interpolate_general: need exactly " + std::to_string(p) + " points");
  }
  if (values.size() != p) throw std::invalid_argument("interpolate_general: one value per point required");

  Vector c;
  if (center) {
    c = *center;
  } else {
    c = Vector::Zero(static_cast<Eigen::Index>(n));
    for (const auto& y : points.points()) c += y;
    c /= static_cast<double>(p);
  }
  double r = 0.0;
  for (const auto& y : points.points()) r = std::max(r, (y - c).norm());
  if (r == 0.0) throw NotPoisedError("interpolate_general: points coincide with the centre");

  const Matrix basis = quadratic_basis_matrix(points.points(), c, r);
  if (linalg::rank(basis, settings.poised_rel_tol) < p) {
    throw NotPoisedError("interpolate_general: point set is not poised for quadratic interpolation");
  }
  const Vector rhs = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(p));
  const Vector coef = basis.fullPivLu().solve(rhs);

  // Coefficients in the scaled frame z = (x - c) / r.
  const auto dim = static_cast<Eigen::Index>(n);
  const double b0 = coef[0];
  const Vector b = coef.segment(1, dim);
  Matrix B(dim, dim);
  Eigen::Index idx = 1 + dim;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i; j < dim; ++j) {
      B(i, j) = coef[idx];
      B(j, i) = coef[idx];
      ++idx;
    }
  }

  QuadraticModel q;
  q.H = B / (r * r);
  q.alpha = b / r - q.H * c;
  q.alpha0 = b0 - b.dot(c) / r + 0.5 * c.dot(q.H * c);
  return q;
}

QuadraticModel interpolate_minimal(const Vector& x0, const DirectionSet& S, std::size_t k,
                                   EvaluationCache& cache, const NumericSettings& settings) {
  if (static_cast<std::size_t>(x0.size()) != S.dim()) {
    throw std::invalid_argument("interpolate_minimal: dimension mismatch");
  }
  const DirectionSet U = build_uk(S, k);
  const auto n = static_cast<Eigen::Index>(S.dim());
  const Matrix& s = S.matrix();
  const Matrix& t = U.matrix();

  const double f0 = cache.evaluate(x0);
  std::vector<Vector> base(static_cast<std::size_t>(n));
  Vector fs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    base[static_cast<std::size_t>(i)] = x0 + s.col(i);
    fs[i] = cache.evaluate(base[static_cast<std::size_t>(i)]);
  }
  const auto f_shift = [&](Eigen::Index i, Eigen::Index j) {
    return cache.evaluate(base[static_cast<std::size_t>(i)] + t.col(j));
  };

  Matrix hhat(n, n);
  if (k == 0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      hhat(i, i) = f_shift(i, i) - 2.0 * fs[i] + f0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        hhat(i, j) = f_shift(i, j) - fs[i] - fs[j] + f0;
        hhat(j, i) = hhat(i, j);
      }
    }
  } else {
    const auto pivot = static_cast<Eigen::Index>(k - 1);
    const double f_minus = cache.evaluate(x0 + t.col(pivot));  // x0 - s^k
    Vector fd(n);                                               // f(x0 + s^i - s^k)
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != pivot) fd[i] = cache.evaluate(x0 + t.col(i));
    }
    hhat(pivot, pivot) = fs[pivot] + f_minus - 2.0 * f0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == pivot) continue;
      hhat(i, pivot) = -fd[i] + fs[i] + f_minus - f0;
      hhat(pivot, i) = hhat(i, pivot);
      hhat(i, i) = f_shift(i, i) - 2.0 * fd[i] + f_minus;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (j == pivot) continue;
        hhat(i, j) = f_shift(i, j) - fd[i] - fd[j] + f_minus;
        hhat(j, i) = hhat(i, j);
      }
    }
  }

  // H = S^{-T} Hhat S^{-1}
  const Matrix st = s.transpose();
  const Matrix left = linalg::solve(st, hhat, settings);
  const Matrix h = linalg::solve(st, left.transpose(), settings).transpose();

  QuadraticModel q;
  q.H = 0.5 * (h + h.transpose());
  Vector alpha_bar(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    alpha_bar[i] = fs[i] - f0 - 0.5 * hhat(i, i) - x0.dot(q.H * s.col(i));
  }
  q.alpha = linalg::solve(st, alpha_bar, settings);
  q.alpha0 = f0 - q.alpha.dot(x0) - 0.5 * x0.dot(q.H * x0);
  return q;
}

}  // namespace dfh
