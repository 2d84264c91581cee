#pragma once

#include "dfh/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace dfh {

/// Certified bounds for a function over a closed ball B(x0, R).
struct DerivativeEnvelope {
  double sup_value = 0.0;      ///< sup |f|
  double sup_gradient = 0.0;   ///< sup ||grad f||
  double sup_hessian = 0.0;    ///< sup ||Hessian||_2, a Lipschitz constant of grad f
  double lip_hessian = 0.0;    ///< Lipschitz constant of the Hessian in the spectral norm
  double inf_abs_value = 0.0;  ///< inf |f|, a lower bound
};

/// A registry function with analytic derivatives and certified envelopes.
struct TestFunction {
  enum class Kind { base, product, quotient, power };

  std::string name;
  std::size_t dim = 0;
  Kind kind = Kind::base;
  std::vector<std::shared_ptr<const TestFunction>> parts;  ///< operands of a composite
  unsigned exponent = 0;                                   ///< power composites only
  Vector default_x0;

  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
  std::function<DerivativeEnvelope(const Vector& x0, double radius)> envelope;

  Oracle oracle() const { return value; }
};

/// Names of the base functions: quadratic, sum-of-cubes, exp-of-sum,
/// rosenbrock, shifted-sphere.
std::vector<std::string> base_function_names();

/// Builds a function from an expression such as `sum-of-cubes`,
/// `product(exp-of-sum,shifted-sphere)` or `power(rosenbrock,3)`. The seed
/// drives the random quadratic. Runs self_check and throws
/// std::invalid_argument for unknown names, malformed expressions, or a
/// failed self-check.
std::shared_ptr<const TestFunction> make_function(const std::string& expr, std::size_t dim,
                                                  std::uint64_t seed = 1);

/// Largest mismatch between the analytic gradient/Hessian and central finite
/// differences at `trials` random points near default_x0, relative to
/// 1 + |analytic entry|.
double self_check(const TestFunction& fn, std::uint64_t seed = 7, int trials = 5);

}  // namespace dfh
