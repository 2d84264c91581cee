#include "dfh/approx.hpp"

#include "dfh/errors.hpp"
#include "dfh/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace dfh {

namespace {

void require_full_row_rank(const DirectionSet& set, const char* name, const NumericSettings& settings) {
  const std::size_t r = linalg::rank(set.matrix(), settings.rank_rel_tol);
  if (r < set.dim()) throw RankDeficientError(name, r, set.dim());
}

void require_dim(const Vector& x0, const DirectionSet& set) {
  if (static_cast<std::size_t>(x0.size()) != set.dim()) {
    throw std::invalid_argument("point and direction set dimensions differ");
  }
}

/// delta_f at `base` where f(base) is already known.
Vector differences_at(const Vector& base, double f_base, const DirectionSet& T, EvaluationCache& cache) {
  Vector d(static_cast<Eigen::Index>(T.size()));
  for (std::size_t j = 0; j < T.size(); ++j) {
    d[static_cast<Eigen::Index>(j)] = cache.evaluate(base + T.direction(j)) - f_base;
  }
  return d;
}

}  // namespace

Vector delta_f(const Vector& x0, const DirectionSet& T, EvaluationCache& cache) {
  require_dim(x0, T);
  return differences_at(x0, cache.evaluate(x0), T, cache);
}

GradientResult simplex_gradient(const Vector& x0, const DirectionSet& T, EvaluationCache& cache,
                                const NumericSettings& settings) {
  require_dim(x0, T);
  require_full_row_rank(T, "T", settings);
  const std::size_t before = cache.distinct_count();
  const Matrix pinv_tt = linalg::pseudoinverse(T.matrix().transpose(), settings);
  GradientResult result;
  result.gradient = pinv_tt * delta_f(x0, T, cache);
  result.set_radius = T.radius();
  result.eval_count = cache.distinct_count() - before;
  return result;
}

HessianResult nested_set_hessian(const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                                 EvaluationCache& cache, bool symmetrize, const NumericSettings& settings) {
  require_dim(x0, S);
  require_dim(x0, T);
  require_full_row_rank(S, "S", settings);
  require_full_row_rank(T, "T", settings);

  const std::size_t before = cache.distinct_count();
  const Matrix pinv_tt = linalg::pseudoinverse(T.matrix().transpose(), settings);
  const Vector grad0 = pinv_tt * delta_f(x0, T, cache);

  const auto m = static_cast<Eigen::Index>(S.size());
  Matrix grad_diff(m, x0.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vector base = x0 + S.matrix().col(i);
    const Vector grad_i = pinv_tt * differences_at(base, cache.evaluate(base), T, cache);
    grad_diff.row(i) = (grad_i - grad0).transpose();
  }

  HessianResult result;
  result.hessian = linalg::pseudoinverse(S.matrix().transpose(), settings) * grad_diff;
  if (symmetrize) {
    const Matrix sym = 0.5 * (result.hessian + result.hessian.transpose());
    result.hessian = sym;
  }
  result.symmetrized = symmetrize;
  result.delta_u = std::max(S.radius(), T.radius());
  result.delta_l = std::min(S.radius(), T.radius());
  result.eval_count = cache.distinct_count() - before;
  return result;
}

}  // namespace dfh
