#pragma once

#include "dfh/types.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace dfh {

/// Ordered collection of direction vectors in R^n, stored as the columns of
/// an n x m matrix, with its radius max_i ||d_i||.
class DirectionSet {
 public:
  DirectionSet() = default;

  /// Throws std::invalid_argument if `directions` is empty or non-finite.
  explicit DirectionSet(Matrix directions);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(directions_.rows()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(directions_.cols()); }
  const Matrix& matrix() const noexcept { return directions_; }
  Vector direction(std::size_t i) const { return directions_.col(static_cast<Eigen::Index>(i)); }
  double radius() const noexcept { return radius_; }

  DirectionSet scaled(double factor) const;

  /// The unit-radius set D / radius. Throws if every direction is zero.
  Matrix normalized() const;

 private:
  Matrix directions_;
  double radius_ = 0.0;
};

struct DirectionPair {
  DirectionSet S;
  DirectionSet T;
};

/// Exact-coincidence index over points in R^n. Two points match when their
/// max-norm distance is at most the tolerance. Points are bucketed by first
/// coordinate so a lookup only inspects the band |x_0 - y_0| <= tolerance.
class PointIndex {
 public:
  explicit PointIndex(double tolerance = 0.0) : tolerance_(tolerance) {}

  std::optional<std::size_t> find(const Vector& x) const;
  void insert(const Vector& x, std::size_t id);

  double tolerance() const noexcept { return tolerance_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    Vector point;
    std::size_t id;
  };

  double tolerance_;
  std::multimap<double, Entry> entries_;
};

/// Ordered list of pairwise-distinct points. Insertion silently drops points
/// that coincide with an existing one under the set's tolerance.
class PointSet {
 public:
  PointSet(std::size_t dim, double tolerance);

  /// Builds a set from arbitrary points using the tolerance
  /// point_rel_tol * (1 + max_i ||p_i||).
  static PointSet from_points(const std::vector<Vector>& points, const NumericSettings& settings = {});

  /// Returns false when the point was already present.
  bool insert(const Vector& p);
  bool contains(const Vector& p) const { return index_.find(p).has_value(); }
  std::optional<std::size_t> find(const Vector& p) const { return index_.find(p); }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return points_.size(); }
  double tolerance() const noexcept { return index_.tolerance(); }
  const std::vector<Vector>& points() const noexcept { return points_; }
  const Vector& operator[](std::size_t i) const { return points_[i]; }

  /// Set equality under this set's tolerance, ignoring order.
  bool same_points(const PointSet& other) const;

 private:
  std::size_t dim_;
  std::vector<Vector> points_;
  PointIndex index_;
};

/// (n+1)(n+2)/2, the number of coefficients of a quadratic on R^n.
std::size_t quadratic_basis_size(std::size_t n);

/// Coincidence tolerance for the evaluation points of (x0; S, T).
double dedup_tolerance(const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                       const NumericSettings& settings = {});

/// U_0 = S; for k >= 1 (1-based pivot column), column i of U_k is s^i - s^k
/// for i != k and column k is -s^k. Requires S to be n x n and k <= n.
DirectionSet build_uk(const DirectionSet& S, std::size_t k);

/// S = beta * Id_n and T = beta * E_k, where E_k = build_uk(Id_n, k).
DirectionPair canonical_set(std::size_t n, std::size_t k, double beta);

/// Every distinct point evaluated by the nested-set Hessian over (x0; S, T):
/// x0, x0 + t^j, x0 + s^i and x0 + s^i + t^j, in that insertion order.
/// Sums are formed left to right.
PointSet nshc_points(const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                     const NumericSettings& settings = {});

std::size_t count_distinct(const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                           const NumericSettings& settings = {});

/// Rows [1, z, z_i^2 / 2, z_i z_j (i < j)] for z = (y - center) / scale.
/// Columns follow the order 1, z_1..z_n, then the upper triangle row by row.
Matrix quadratic_basis_matrix(const std::vector<Vector>& points, const Vector& center, double scale);

/// True when the quadratic interpolation system over the points has only the
/// trivial homogeneous solution. The basis is centred at the centroid and
/// scaled by the set radius before the rank test. Throws
/// std::invalid_argument unless |points| == (n+1)(n+2)/2.
bool is_poised_quadratic(const PointSet& points, const NumericSettings& settings = {});

struct MinimalityResult {
  bool minimal = false;
  std::optional<DirectionPair> witness;

  explicit operator bool() const noexcept { return minimal; }
};

/// Largest dimension the exhaustive minimality search accepts.
inline constexpr std::size_t kMinimalSearchMaxDim = 3;

/// Every (S, T) pair of full-rank n x n matrices, up to column order, whose
/// evaluation set is exactly `points`. Candidate directions are differences
/// y - x0 of points in the set. Throws SearchBoundExceededError for n > 3 and
/// std::invalid_argument when x0 is not in the set.
std::vector<DirectionPair> minimal_witnesses(const PointSet& points, const Vector& x0,
                                             const NumericSettings& settings = {});

/// True iff the set can be written as a minimal poised set for nested-set
/// Hessian computation at x0; the first witness found is returned.
MinimalityResult is_minimal_nshc(const PointSet& points, const Vector& x0,
                                 const NumericSettings& settings = {});

}  // namespace dfh
