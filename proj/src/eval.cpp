#include "dfh/eval.hpp"

#include "dfh/errors.hpp"

#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace dfh {

EvaluationCache::EvaluationCache(Oracle oracle, double tolerance)
    : oracle_(std::move(oracle)), index_(tolerance) {
  if (!oracle_) throw std::invalid_argument("EvaluationCache: empty oracle");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("EvaluationCache: tolerance must be nonnegative");
}

EvaluationCache EvaluationCache::for_sets(Oracle oracle, const Vector& x0, const DirectionSet& S,
                                          const DirectionSet& T, const NumericSettings& settings) {
  return EvaluationCache(std::move(oracle), dedup_tolerance(x0, S, T, settings));
}

EvaluationCache::EvaluationCache(EvaluationCache&& other) noexcept
    : oracle_(std::move(other.oracle_)),
      index_(std::move(other.index_)),
      values_(std::move(other.values_)),
      total_requests_(other.total_requests_),
      tracing_(other.tracing_),
      trace_(std::move(other.trace_)) {}

double EvaluationCache::evaluate(const Vector& x) {
  std::lock_guard lock(mutex_);
  ++total_requests_;
  if (auto id = index_.find(x)) {
    const double value = values_[*id];
    if (tracing_) trace_.push_back({x, value, true});
    return value;
  }

  double value = 0.0;
  try {
    value = oracle_(x);
  } catch (const std::exception& e) {
    throw OracleError(x, e.what());
  }
  if (!std::isfinite(value)) throw OracleError(x, "non-finite value");

  index_.insert(x, values_.size());
  values_.push_back(value);
  if (tracing_) trace_.push_back({x, value, false});
  return value;
}

std::optional<double> EvaluationCache::lookup(const Vector& x) const {
  std::lock_guard lock(mutex_);
  if (auto id = index_.find(x)) return values_[*id];
  return std::nullopt;
}

std::size_t EvaluationCache::distinct_count() const {
  std::lock_guard lock(mutex_);
  return values_.size();
}

std::size_t EvaluationCache::total_requests() const {
  std::lock_guard lock(mutex_);
  return total_requests_;
}

void EvaluationCache::set_tracing(bool enabled) {
  std::lock_guard lock(mutex_);
  tracing_ = enabled;
}

std::vector<TraceEntry> EvaluationCache::trace() const {
  std::lock_guard lock(mutex_);
  return trace_;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceEntry>& trace) {
  const Eigen::Index n = trace.empty() ? 0 : trace.front().point.size();
  for (Eigen::Index i = 0; i < n; ++i) os << 'x' << (i + 1) << ',';
  os << "value,outcome\n";
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : trace) {
    for (Eigen::Index i = 0; i < e.point.size(); ++i) os << e.point[i] << ',';
    os << e.value << ',' << (e.hit ? "hit" : "miss") << '\n';
  }
  os.precision(old_precision);
}

}  // namespace dfh
