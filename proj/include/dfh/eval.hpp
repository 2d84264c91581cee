#pragma once

#include "dfh/sets.hpp"
#include "dfh/types.hpp"

#include <cstddef>
#include <mutex>
#include <optional>
#include <ostream>
#include <vector>

namespace dfh {

/// One request made through an EvaluationCache.
struct TraceEntry {
  Vector point;
  double value;
  bool hit;
};

/// Counting, de-duplicating wrapper around a scalar oracle.
///
/// Points are matched with the PointIndex coincidence rule, so a cache built
/// with dedup_tolerance(x0, S, T) counts exactly the points that
/// nshc_points(x0, S, T) enumerates. The first value computed for a point is
/// kept. evaluate() is safe to call concurrently: the internal lock is held
/// across the oracle call, so the oracle runs at most once per distinct point.
class EvaluationCache {
 public:
  explicit EvaluationCache(Oracle oracle, double tolerance = 1e-12);

  /// Cache whose coincidence tolerance matches nshc_points(x0, S, T).
  static EvaluationCache for_sets(Oracle oracle, const Vector& x0, const DirectionSet& S,
                                  const DirectionSet& T, const NumericSettings& settings = {});

  EvaluationCache(const EvaluationCache&) = delete;
  EvaluationCache& operator=(const EvaluationCache&) = delete;
  EvaluationCache(EvaluationCache&& other) noexcept;
  EvaluationCache& operator=(EvaluationCache&&) = delete;

  /// Returns f(x). Throws OracleError if the oracle throws or returns a
  /// non-finite value; failed points are not cached.
  double evaluate(const Vector& x);

  /// Cached value for x without calling the oracle.
  std::optional<double> lookup(const Vector& x) const;

  std::size_t distinct_count() const;
  std::size_t total_requests() const;
  double tolerance() const noexcept { return index_.tolerance(); }

  void set_tracing(bool enabled);
  std::vector<TraceEntry> trace() const;

 private:
  Oracle oracle_;
  mutable std::mutex mutex_;
  PointIndex index_;
  std::vector<double> values_;
  std::size_t total_requests_ = 0;
  bool tracing_ = false;
  std::vector<TraceEntry> trace_;
};

/// CSV with header x1,...,xn,value,outcome where outcome is hit or miss.
void write_trace_csv(std::ostream& os, const std::vector<TraceEntry>& trace);

}  // namespace dfh
