#pragma once

#include "dfh/bounds.hpp"
#include "dfh/calculus.hpp"
#include "dfh/registry.hpp"
#include "dfh/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dfh {

enum class Estimator { nested_set, product_sc, product_qc, quotient_sc, quotient_qc, power_sc, power_qc };

/// Parses names such as `nested-set` or `quotient-qc`; throws std::invalid_argument.
Estimator parse_estimator(const std::string& name);
std::string estimator_name(Estimator e);

enum class SetFamily {
  canonical,  ///< S = beta Id, T = beta E_k
  random,     ///< seeded S rescaled to radius beta, T = U_k(S)
  fixed,      ///< beta * (S, T) from the config
};

struct StudyConfig {
  std::string function = "sum-of-cubes";
  std::size_t dim = 2;
  std::optional<Vector> x0;  ///< defaults to the function's default point
  SetFamily family = SetFamily::canonical;
  std::size_t k = 0;
  std::optional<Matrix> S;  ///< fixed family only
  std::optional<Matrix> T;  ///< fixed family only
  double beta_start = 0.1;
  double beta_ratio = 0.5;
  std::size_t beta_steps = 12;
  Estimator estimator = Estimator::nested_set;
  bool symmetrize = false;
  std::uint64_t seed = 1;
  NormKind norm = NormKind::spectral;
  bool parallel = true;
  NumericSettings settings;
};

struct StudyRow {
  double beta = 0.0;
  double error_spec = 0.0;
  double error_fro = 0.0;
  double bound = 0.0;
  std::size_t evals = 0;
  double noise_floor = 0.0;  ///< below this an error is indistinguishable from rounding
};

struct ConvergenceReport {
  std::string function;
  Estimator estimator = Estimator::nested_set;
  std::vector<StudyRow> rows;          ///< decreasing beta
  bool exact = false;                  ///< every error lies below its noise floor
  std::optional<double> fitted_order;  ///< slope of log error against log beta
  std::optional<double> kappa;         ///< exp of the fitted intercept
  std::size_t fitted_rows = 0;

  /// True when every row's error is at most its bound plus its noise floor.
  /// The bounds hold in exact arithmetic; the floor absorbs rounding.
  bool within_bounds() const;
};

/// Geometric schedule beta_start * ratio^i, i < steps.
std::vector<double> beta_schedule(double start, double ratio, std::size_t steps);

/// Ordinary least squares fit of y = a + b x; returns (a, b).
std::pair<double, double> least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

/// Runs the estimator over the beta schedule. Configuration problems throw
/// std::invalid_argument; estimator failures are rethrown as dfh::Error with
/// the offending beta in the message.
ConvergenceReport run_study(const StudyConfig& config);

/// One estimate with its reference, bound and noise floor. Used by run_study
/// for each beta and by the approx subcommand.
struct EstimateOutcome {
  HessianResult result;
  Matrix reference;
  double bound = 0.0;
  double noise_floor = 0.0;
  std::size_t evals = 0;
};

EstimateOutcome run_estimate(const TestFunction& fn, Estimator estimator, const Vector& x0, const DirectionSet& S,
                             const DirectionSet& T, bool symmetrize, NormKind norm = NormKind::spectral,
                             const NumericSettings& settings = {});

/// Direction sets of a study configuration at radius parameter beta.
DirectionPair study_sets(const StudyConfig& config, double beta);

struct ExampleCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Reproduces the worked two-dimensional examples: the canonical minimal set
/// and its witness, a poised set that is not minimal, and minimality of
/// transformed canonical sets.
std::vector<ExampleCheck> verify_examples();

}  // namespace dfh
