#include "dfh/sets.hpp"

#include "dfh/errors.hpp"
#include "dfh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace dfh {

DirectionSet::DirectionSet(Matrix directions) : directions_(std::move(directions)) {
  if (directions_.rows() == 0 || directions_.cols() == 0) {
    throw std::invalid_argument("DirectionSet: empty direction matrix");
  }
  if (!directions_.allFinite()) throw std::invalid_argument("DirectionSet: non-finite direction");
  radius_ = directions_.colwise().norm().maxCoeff();
}

DirectionSet DirectionSet::scaled(double factor) const { return DirectionSet(directions_ * factor); }

Matrix DirectionSet::normalized() const {
  if (radius_ == 0.0) throw std::invalid_argument("DirectionSet: zero radius cannot be normalized");
  return directions_ / radius_;
}

// PointIndex

std::optional<std::size_t> PointIndex::find(const Vector& x) const {
  if (entries_.empty()) return std::nullopt;
  auto it = entries_.lower_bound(x[0] - tolerance_);
  const auto end = entries_.upper_bound(x[0] + tolerance_);
  for (; it != end; ++it) {
    const Vector& y = it->second.point;
    if (y.size() == x.size() && (y - x).cwiseAbs().maxCoeff() <= tolerance_) return it->second.id;
  }
  return std::nullopt;
}

void PointIndex::insert(const Vector& x, std::size_t id) { entries_.emplace(x[0], Entry{x, id}); }

// PointSet

PointSet::PointSet(std::size_t dim, double tolerance) : dim_(dim), index_(tolerance) {
  if (dim == 0) throw std::invalid_argument("PointSet: dimension must be positive");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("PointSet: tolerance must be nonnegative");
}

PointSet PointSet::from_points(const std::vector<Vector>& points, const NumericSettings& settings) {
  if (points.empty()) throw std::invalid_argument("PointSet: no points");
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.norm());
  PointSet set(static_cast<std::size_t>(points.front().size()), settings.point_rel_tol * (1.0 + scale));
  for (const auto& p : points) set.insert(p);
  return set;
}

bool PointSet::insert(const Vector& p) {
  if (static_cast<std::size_t>(p.size()) != dim_) throw std::invalid_argument("PointSet: dimension mismatch");
  if (!p.allFinite()) throw std::invalid_argument("PointSet: non-finite point");
  if (index_.find(p)) return false;
  index_.insert(p, points_.size());
  points_.push_back(p);
  return true;
}

bool PointSet::same_points(const PointSet& other) const {
  if (other.dim_ != dim_ || other.size() != size()) return false;
  return std::all_of(other.points_.begin(), other.points_.end(),
                     [this](const Vector& p) { return contains(p); });
}

// Construction

std::size_t quadratic_basis_size(std::size_t n) { return (n + 1) * (n + 2) / 2; }

double dedup_tolerance(const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                       const NumericSettings& settings) {
  return settings.point_rel_tol * (1.0 + x0.norm() + S.radius() + T.radius());
}

DirectionSet build_uk(const DirectionSet& S, std::size_t k) {
  const std::size_t n = S.dim();
  if (S.size() != n) {
    throw std::invalid_argument("build_uk: S must have exactly n = " + std::to_string(n) + " columns");
  }
  if (k > n) throw std::invalid_argument("build_uk: k must lie in {0, ..., n}");
  if (k == 0) return S;

  const Eigen::Index pivot = static_cast<Eigen::Index>(k - 1);
  const Vector sk = S.matrix().col(pivot);
  Matrix u(S.matrix().rows(), S.matrix().cols());
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    u.col(i) = (i == pivot) ? Vector(-sk) : Vector(S.matrix().col(i) - sk);
  }
  return DirectionSet(std::move(u));
}

DirectionPair canonical_set(std::size_t n, std::size_t k, double beta) {
  if (n == 0) throw std::invalid_argument("canonical_set: n must be positive");
  if (k > n) throw std::invalid_argument("canonical_set: k must lie in {0, ..., n}");
  if (beta == 0.0 || !std::isfinite(beta)) {
    throw std::invalid_argument("canonical_set: beta must be finite and nonzero");
  }
  const DirectionSet identity(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  return {identity.scaled(beta), build_uk(identity, k).scaled(beta)};
}

PointSet nshc_points(const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                     const NumericSettings& settings) {
  if (S.dim() != T.dim() || static_cast<std::size_t>(x0.size()) != S.dim()) {
    throw std::invalid_argument("nshc_points: dimension mismatch");
  }
  PointSet points(S.dim(), dedup_tolerance(x0, S, T, settings));
  points.insert(x0);
  for (std::size_t j = 0; j < T.size(); ++j) points.insert(x0 + T.direction(j));
  for (std::size_t i = 0; i < S.size(); ++i) {
    const Vector base = x0 + S.direction(i);
    points.insert(base);
    for (std::size_t j = 0; j < T.size(); ++j) points.insert(base + T.direction(j));
  }
  return points;
}

std::size_t count_distinct(const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                           const NumericSettings& settings) {
  return nshc_points(x0, S, T, settings).size();
}

Matrix quadratic_basis_matrix(const std::vector<Vector>& points, const Vector& center, double scale) {
  if (points.empty()) throw std::invalid_argument("quadratic_basis_matrix: no points");
  if (!(scale > 0.0)) throw std::invalid_argument("quadratic_basis_matrix: scale must be positive");
  const Eigen::Index n = center.size();
  const Eigen::Index cols = static_cast<Eigen::Index>(quadratic_basis_size(static_cast<std::size_t>(n)));
  Matrix basis(static_cast<Eigen::Index>(points.size()), cols);
  for (std::size_t r = 0; r < points.size(); ++r) {
    const Vector z = (points[r] - center) / scale;
    const auto row = static_cast<Eigen::Index>(r);
    Eigen::Index c = 0;
    basis(row, c++) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) basis(row, c++) = z[i];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) basis(row, c++) = (i == j) ? 0.5 * z[i] * z[i] : z[i] * z[j];
    }
  }
  return basis;
}

bool is_poised_quadratic(const PointSet& points, const NumericSettings& settings) {
  const std::size_t p = quadratic_basis_size(points.dim());
  if (points.size() != p) {
    throw std::invalid_argument("is_poised_quadratic: need exactly " + std::to_string(p) + " points, got " +
                                std::to_string(points.size()));
  }
  Vector centroid = Vector::Zero(static_cast<Eigen::Index>(points.dim()));
  for (const auto& y : points.points()) centroid += y;
  centroid /= static_cast<double>(p);
  double radius = 0.0;
  for (const auto& y : points.points()) radius = std::max(radius, (y - centroid).norm());
  if (radius == 0.0) return false;

  const Matrix basis = quadratic_basis_matrix(points.points(), centroid, radius);
  return linalg::rank(basis, settings.poised_rel_tol) == p;
}

// Minimality search

namespace {

/// Calls visit(indices) for every strictly increasing choice of `r` indices
/// from [0, count); stops early when visit returns true.
bool for_each_combination(std::size_t count, std::size_t r,
                          const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  if (r > count) return false;
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    if (visit(idx)) return true;
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == count - r + (i - 1)) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Matrix columns_of(const std::vector<Vector>& candidates, const std::vector<std::size_t>& pick) {
  Matrix m(candidates.front().size(), static_cast<Eigen::Index>(pick.size()));
  for (std::size_t c = 0; c < pick.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = candidates[pick[c]];
  return m;
}

std::vector<DirectionPair> search_witnesses(const PointSet& points, const Vector& x0, bool first_only,
                                            const NumericSettings& settings) {
  const std::size_t n = points.dim();
  if (n > kMinimalSearchMaxDim) {
    throw SearchBoundExceededError("minimality search bound exceeded: n = " + std::to_string(n) +
                                   " > " + std::to_string(kMinimalSearchMaxDim));
  }
  if (static_cast<std::size_t>(x0.size()) != n) throw std::invalid_argument("minimality search: dimension mismatch");
  if (!points.contains(x0)) throw std::invalid_argument("minimality search: x0 is not in the point set");

  std::vector<DirectionPair> found;
  if (points.size() != quadratic_basis_size(n)) return found;

  std::vector<Vector> offsets;
  for (const auto& y : points.points()) {
    if ((y - x0).cwiseAbs().maxCoeff() > points.tolerance()) offsets.push_back(y - x0);
  }

  const auto full_rank = [&](const Matrix& m) {
    return linalg::rank(m, settings.rank_rel_tol) == n;
  };

  for_each_combination(offsets.size(), n, [&](const std::vector<std::size_t>& s_pick) {
    const Matrix s = columns_of(offsets, s_pick);
    if (!full_rank(s)) return false;

    // t must satisfy x0 + t in the set and x0 + s^i + t in the set for every i.
    std::vector<Vector> t_candidates;
    for (const auto& t : offsets) {
      bool ok = true;
      for (Eigen::Index i = 0; i < s.cols() && ok; ++i) ok = points.contains(Vector(x0 + s.col(i)) + t);
      if (ok) t_candidates.push_back(t);
    }

    return for_each_combination(t_candidates.size(), n, [&](const std::vector<std::size_t>& t_pick) {
      const Matrix t = columns_of(t_candidates, t_pick);
      if (!full_rank(t)) return false;
      DirectionSet S(s), T(t);
      const PointSet generated = nshc_points(x0, S, T, settings);
      if (generated.size() != points.size() || !points.same_points(generated)) return false;
      found.push_back({std::move(S), std::move(T)});
      return first_only;
    });
  });
  return found;
}

}  // namespace

std::vector<DirectionPair> minimal_witnesses(const PointSet& points, const Vector& x0,
                                             const NumericSettings& settings) {
  return search_witnesses(points, x0, false, settings);
}

MinimalityResult is_minimal_nshc(const PointSet& points, const Vector& x0, const NumericSettings& settings) {
  auto found = search_witnesses(points, x0, true, settings);
  if (found.empty()) return {};
  return {true, std::move(found.front())};
}

}  // namespace dfh
