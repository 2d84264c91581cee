#include "dfh/registry.hpp"

#include "dfh/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dfh {

namespace {

using Fn = std::shared_ptr<const TestFunction>;

double inf_from_gradient(double value_at_x0, double sup_gradient, double radius) {
  return std::max(0.0, std::abs(value_at_x0) - sup_gradient * radius);
}

// base^e for e >= 0, with 0^0 = 1.
double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

Fn make_quadratic(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const auto d = static_cast<Eigen::Index>(n);
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      a(i, j) = u(rng);
      a(j, i) = a(i, j);
    }
  }
  Vector b(d);
  for (Eigen::Index i = 0; i < d; ++i) b[i] = u(rng);
  const double c = u(rng);
  const double a_norm = linalg::spectral_norm(a);

  auto fn = std::make_shared<TestFunction>();
  fn->name = "quadratic";
  fn->dim = n;
  fn->default_x0 = Vector::Constant(d, 0.5);
  fn->value = [a, b, c](const Vector& x) { return 0.5 * x.dot(a * x) + b.dot(x) + c; };
  fn->gradient = [a, b](const Vector& x) -> Vector { return a * x + b; };
  fn->hessian = [a](const Vector&) -> Matrix { return a; };
  fn->envelope = [a, b, c, a_norm, f = fn->value](const Vector& x0, double r) {
    const double rho = x0.norm() + r;
    DerivativeEnvelope e;
    e.sup_value = 0.5 * a_norm * rho * rho + b.norm() * rho + std::abs(c);
    e.sup_gradient = a_norm * rho + b.norm();
    e.sup_hessian = a_norm;
    e.lip_hessian = 0.0;
    e.inf_abs_value = inf_from_gradient(f(x0), e.sup_gradient, r);
    return e;
  };
  return fn;
}

Fn make_sum_of_cubes(std::size_t n) {
  auto fn = std::make_shared<TestFunction>();
  fn->name = "sum-of-cubes";
  fn->dim = n;
  fn->default_x0 = Vector::Ones(static_cast<Eigen::Index>(n));
  fn->value = [](const Vector& x) { return x.array().cube().sum(); };
  fn->gradient = [](const Vector& x) -> Vector { return 3.0 * x.array().square().matrix(); };
  fn->hessian = [](const Vector& x) -> Matrix { return (6.0 * x).asDiagonal(); };
  fn->envelope = [n, f = fn->value](const Vector& x0, double r) {
    const double m = x0.cwiseAbs().maxCoeff() + r;
    const auto dn = static_cast<double>(n);
    DerivativeEnvelope e;
    e.sup_value = dn * m * m * m;
    e.sup_gradient = 3.0 * std::sqrt(dn) * m * m;
    e.sup_hessian = 6.0 * m;
    e.lip_hessian = 6.0;
    e.inf_abs_value = inf_from_gradient(f(x0), e.sup_gradient, r);
    return e;
  };
  return fn;
}

Fn make_exp_of_sum(std::size_t n) {
  auto fn = std::make_shared<TestFunction>();
  fn->name = "exp-of-sum";
  fn->dim = n;
  const auto d = static_cast<Eigen::Index>(n);
  fn->default_x0 = Vector::Constant(d, 0.1);
  fn->value = [](const Vector& x) { return std::exp(x.sum()); };
  fn->gradient = [d](const Vector& x) -> Vector { return Vector::Constant(d, std::exp(x.sum())); };
  fn->hessian = [d](const Vector& x) -> Matrix { return Matrix::Constant(d, d, std::exp(x.sum())); };
  fn->envelope = [n](const Vector& x0, double r) {
    const auto dn = static_cast<double>(n);
    const double spread = std::sqrt(dn) * r;
    const double top = std::exp(x0.sum() + spread);
    DerivativeEnvelope e;
    e.sup_value = top;
    e.sup_gradient = std::sqrt(dn) * top;
    e.sup_hessian = dn * top;
    e.lip_hessian = dn * std::sqrt(dn) * top;
    e.inf_abs_value = std::exp(x0.sum() - spread);
    return e;
  };
  return fn;
}

Fn make_rosenbrock(std::size_t n) {
  if (n < 2) throw std::invalid_argument("rosenbrock needs dim >= 2");
  auto fn = std::make_shared<TestFunction>();
  fn->name = "rosenbrock";
  fn->dim = n;
  const auto d = static_cast<Eigen::Index>(n);
  fn->default_x0 = Vector::Constant(d, 0.5);
  fn->value = [d](const Vector& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = 1.0 - x[i];
      s += 100.0 * a * a + b * b;
    }
    return s;
  };
  fn->gradient = [d](const Vector& x) -> Vector {
    Vector g = Vector::Zero(d);
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      g[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
      g[i + 1] += 200.0 * a;
    }
    return g;
  };
  fn->hessian = [d](const Vector& x) -> Matrix {
    Matrix h = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      h(i, i) += 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
      h(i, i + 1) -= 400.0 * x[i];
      h(i + 1, i) -= 400.0 * x[i];
      h(i + 1, i + 1) += 200.0;
    }
    return h;
  };
  fn->envelope = [n, f = fn->value](const Vector& x0, double r) {
    // Bounds over the box |x_i| <= m, which contains the ball.
    const double m = x0.cwiseAbs().maxCoeff() + r;
    const auto terms = static_cast<double>(n - 1);
    DerivativeEnvelope e;
    e.sup_value = terms * (100.0 * (m + m * m) * (m + m * m) + (1.0 + m) * (1.0 + m));
    e.sup_gradient =
        std::sqrt(static_cast<double>(n)) * (400.0 * m * (m + m * m) + 2.0 * (1.0 + m) + 200.0 * (m + m * m));
    e.sup_hessian = 1200.0 * m * m + 400.0 * m + 202.0 + 800.0 * m;
    // Frobenius norm of the third-derivative tensor.
    e.lip_hessian = std::sqrt(terms * (2400.0 * m * 2400.0 * m + 3.0 * 400.0 * 400.0));
    e.inf_abs_value = inf_from_gradient(f(x0), e.sup_gradient, r);
    return e;
  };
  return fn;
}

Fn make_shifted_sphere(std::size_t n) {
  auto fn = std::make_shared<TestFunction>();
  fn->name = "shifted-sphere";
  fn->dim = n;
  const auto d = static_cast<Eigen::Index>(n);
  fn->default_x0 = Vector::Constant(d, 0.5);
  fn->value = [](const Vector& x) { return 1.0 + x.squaredNorm(); };
  fn->gradient = [](const Vector& x) -> Vector { return 2.0 * x; };
  fn->hessian = [d](const Vector&) -> Matrix { return 2.0 * Matrix::Identity(d, d); };
  fn->envelope = [](const Vector& x0, double r) {
    const double rho = x0.norm() + r;
    const double nearest = std::max(0.0, x0.norm() - r);
    DerivativeEnvelope e;
    e.sup_value = 1.0 + rho * rho;
    e.sup_gradient = 2.0 * rho;
    e.sup_hessian = 2.0;
    e.lip_hessian = 0.0;
    e.inf_abs_value = 1.0 + nearest * nearest;
    return e;
  };
  return fn;
}

// Leibniz bounds for a product.
DerivativeEnvelope product_envelope(const DerivativeEnvelope& a, const DerivativeEnvelope& b) {
  DerivativeEnvelope e;
  e.sup_value = a.sup_value * b.sup_value;
  e.sup_gradient = a.sup_value * b.sup_gradient + a.sup_gradient * b.sup_value;
  e.sup_hessian = a.sup_value * b.sup_hessian + 2.0 * a.sup_gradient * b.sup_gradient + a.sup_hessian * b.sup_value;
  e.lip_hessian = a.sup_value * b.lip_hessian + 3.0 * a.sup_gradient * b.sup_hessian +
                  3.0 * a.sup_hessian * b.sup_gradient + a.lip_hessian * b.sup_value;
  e.inf_abs_value = a.inf_abs_value * b.inf_abs_value;
  return e;
}

// Bounds for 1/b from the chain rule with t -> 1/t.
DerivativeEnvelope reciprocal_envelope(const DerivativeEnvelope& b) {
  const double m = b.inf_abs_value;
  if (!(m > 0.0)) throw std::invalid_argument("quotient: denominator may vanish on the sampling ball");
  DerivativeEnvelope e;
  e.sup_value = 1.0 / m;
  e.sup_gradient = b.sup_gradient / (m * m);
  e.sup_hessian = b.sup_hessian / (m * m) + 2.0 * b.sup_gradient * b.sup_gradient / (m * m * m);
  e.lip_hessian = b.lip_hessian / (m * m) + 6.0 * b.sup_gradient * b.sup_hessian / (m * m * m) +
                  6.0 * ipow(b.sup_gradient, 3) / (m * m * m * m);
  e.inf_abs_value = 1.0 / b.sup_value;
  return e;
}

DerivativeEnvelope power_envelope(const DerivativeEnvelope& a, unsigned p) {
  const int ip = static_cast<int>(p);
  const double dp = p;
  const double a0 = a.sup_value;
  const double a1 = a.sup_gradient;
  const double a2 = a.sup_hessian;
  DerivativeEnvelope e;
  e.sup_value = ipow(a0, ip);
  e.sup_gradient = dp * ipow(a0, ip - 1) * a1;
  e.sup_hessian = dp * ipow(a0, ip - 1) * a2 + dp * (dp - 1.0) * ipow(a0, ip - 2) * a1 * a1;
  e.lip_hessian = dp * ipow(a0, ip - 1) * a.lip_hessian + 3.0 * dp * (dp - 1.0) * ipow(a0, ip - 2) * a1 * a2;
  if (p >= 3) e.lip_hessian += dp * (dp - 1.0) * (dp - 2.0) * ipow(a0, ip - 3) * a1 * a1 * a1;
  e.inf_abs_value = ipow(a.inf_abs_value, ip);
  return e;
}

Fn make_product(const Fn& a, const Fn& b) {
  auto fn = std::make_shared<TestFunction>();
  fn->name = "product(" + a->name + "," + b->name + ")";
  fn->dim = a->dim;
  fn->kind = TestFunction::Kind::product;
  fn->parts = {a, b};
  fn->default_x0 = a->default_x0;
  fn->value = [a, b](const Vector& x) { return a->value(x) * b->value(x); };
  fn->gradient = [a, b](const Vector& x) -> Vector {
    return a->gradient(x) * b->value(x) + b->gradient(x) * a->value(x);
  };
  fn->hessian = [a, b](const Vector& x) -> Matrix {
    const Vector ga = a->gradient(x);
    const Vector gb = b->gradient(x);
    const Matrix cross = ga * gb.transpose();
    return a->hessian(x) * b->value(x) + b->hessian(x) * a->value(x) + cross + cross.transpose();
  };
  fn->envelope = [a, b](const Vector& x0, double r) {
    return product_envelope(a->envelope(x0, r), b->envelope(x0, r));
  };
  return fn;
}

Fn make_quotient(const Fn& a, const Fn& b) {
  auto fn = std::make_shared<TestFunction>();
  fn->name = "quotient(" + a->name + "," + b->name + ")";
  fn->dim = a->dim;
  fn->kind = TestFunction::Kind::quotient;
  fn->parts = {a, b};
  fn->default_x0 = a->default_x0;
  fn->value = [a, b](const Vector& x) { return a->value(x) / b->value(x); };
  fn->gradient = [a, b](const Vector& x) -> Vector {
    const double bv = b->value(x);
    return (a->gradient(x) * bv - b->gradient(x) * a->value(x)) / (bv * bv);
  };
  fn->hessian = [a, b](const Vector& x) -> Matrix {
    const double av = a->value(x);
    const double bv = b->value(x);
    const Vector ga = a->gradient(x);
    const Vector gb = b->gradient(x);
    const Matrix cross = ga * gb.transpose();
    const Matrix num = bv * (bv * a->hessian(x) - av * b->hessian(x)) + 2.0 * av * (gb * gb.transpose()) -
                       bv * (cross + cross.transpose());
    return num / (bv * bv * bv);
  };
  fn->envelope = [a, b](const Vector& x0, double r) {
    return product_envelope(a->envelope(x0, r), reciprocal_envelope(b->envelope(x0, r)));
  };
  return fn;
}

Fn make_power(const Fn& a, unsigned p) {
  auto fn = std::make_shared<TestFunction>();
  fn->name = "power(" + a->name + "," + std::to_string(p) + ")";
  fn->dim = a->dim;
  fn->kind = TestFunction::Kind::power;
  fn->parts = {a};
  fn->exponent = p;
  fn->default_x0 = a->default_x0;
  const int ip = static_cast<int>(p);
  const double dp = p;
  fn->value = [a, ip](const Vector& x) { return ipow(a->value(x), ip); };
  fn->gradient = [a, ip, dp](const Vector& x) -> Vector {
    return dp * ipow(a->value(x), ip - 1) * a->gradient(x);
  };
  fn->hessian = [a, ip, dp](const Vector& x) -> Matrix {
    const double av = a->value(x);
    const Vector ga = a->gradient(x);
    return dp * ipow(av, ip - 1) * a->hessian(x) + dp * (dp - 1.0) * ipow(av, ip - 2) * (ga * ga.transpose());
  };
  fn->envelope = [a, p](const Vector& x0, double r) { return power_envelope(a->envelope(x0, r), p); };
  return fn;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth < 0) throw std::invalid_argument("unbalanced parentheses in function expression");
    if (s[i] == ',' && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw std::invalid_argument("unbalanced parentheses in function expression");
  out.push_back(trim(s.substr(start)));
  return out;
}

Fn parse(const std::string& raw, std::size_t n, std::uint64_t seed) {
  const std::string expr = trim(raw);
  const auto open = expr.find('(');
  if (open == std::string::npos) {
    if (expr == "quadratic") return make_quadratic(n, seed);
    if (expr == "sum-of-cubes") return make_sum_of_cubes(n);
    if (expr == "exp-of-sum") return make_exp_of_sum(n);
    if (expr == "rosenbrock") return make_rosenbrock(n);
    if (expr == "shifted-sphere") return make_shifted_sphere(n);
    throw std::invalid_argument("unknown function '" + expr + "'");
  }
  if (expr.back() != ')') throw std::invalid_argument("malformed function expression '" + expr + "'");
  const std::string head = trim(expr.substr(0, open));
  const auto args = split_args(expr.substr(open + 1, expr.size() - open - 2));
  if (args.size() != 2) throw std::invalid_argument(head + " takes two arguments");
  if (head == "product") return make_product(parse(args[0], n, seed), parse(args[1], n, seed + 1));
  if (head == "quotient") return make_quotient(parse(args[0], n, seed), parse(args[1], n, seed + 1));
  if (head == "power") {
    std::size_t used = 0;
    unsigned long p = 0;
    try {
      p = std::stoul(args[1], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != args[1].size() || p < 2 || p > 64) {
      throw std::invalid_argument("power exponent must be an integer in [2, 64]");
    }
    return make_power(parse(args[0], n, seed), static_cast<unsigned>(p));
  }
  throw std::invalid_argument("unknown combinator '" + head + "'");
}

}  // namespace

std::vector<std::string> base_function_names() {
  return {"quadratic", "sum-of-cubes", "exp-of-sum", "rosenbrock", "shifted-sphere"};
}

double self_check(const TestFunction& fn, std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.25, 0.25);
  const auto d = static_cast<Eigen::Index>(fn.dim);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Vector x = fn.default_x0;
    for (Eigen::Index i = 0; i < d; ++i) x[i] += u(rng);
    const double h = 1e-5 * (1.0 + x.cwiseAbs().maxCoeff());
    const Vector g = fn.gradient(x);
    const Matrix hess = fn.hessian(x);
    for (Eigen::Index i = 0; i < d; ++i) {
      Vector e = Vector::Zero(d);
      e[i] = h;
      const double fd = (fn.value(x + e) - fn.value(x - e)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[i]) / (1.0 + std::abs(g[i])));
      const Vector col = (fn.gradient(x + e) - fn.gradient(x - e)) / (2.0 * h);
      for (Eigen::Index j = 0; j < d; ++j) {
        worst = std::max(worst, std::abs(col[j] - hess(j, i)) / (1.0 + std::abs(hess(j, i))));
      }
    }
  }
  return worst;
}

std::shared_ptr<const TestFunction> make_function(const std::string& expr, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("function dimension must be positive");
  Fn fn = parse(expr, dim, seed);
  const double mismatch = self_check(*fn);
  if (!(mismatch <= 1e-5)) {
    throw std::invalid_argument("analytic derivatives of '" + fn->name + "' fail the finite-difference check");
  }
  return fn;
}

}  // namespace dfh
