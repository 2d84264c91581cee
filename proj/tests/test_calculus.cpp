#include "dfh/approx.hpp"
#include "dfh/bounds.hpp"
#include "dfh/calculus.hpp"
#include "dfh/errors.hpp"
#include "dfh/linalg.hpp"
#include "dfh/registry.hpp"
#include "dfh/study.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using dfh::CalcMode;
using dfh::CalcRule;
using dfh::DirectionSet;
using dfh::EvaluationCache;
using dfh::Matrix;
using dfh::Vector;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

struct Quad {
  double c;
  Vector a;
  Matrix H;
  double value(const Vector& x) const { return c + a.dot(x) + 0.5 * x.dot(H * x); }
  Vector grad(const Vector& x) const { return a + H * x; }
};

Quad random_quad(oracle::Gen& gen, int n) {
  return Quad{gen.uniform(-2.0, 2.0), gen.vector(n, -2.0, 2.0), gen.symmetric(n, -2.0, 2.0)};
}

Matrix product_reference(const Quad& f, const Quad& g, const Vector& x) {
  const Matrix cross = f.grad(x) * g.grad(x).transpose();
  return f.H * g.value(x) + cross + cross.transpose() + g.H * f.value(x);
}

Matrix quotient_reference(const Quad& f, const Quad& g, const Vector& x) {
  const double fv = f.value(x);
  const double gv = g.value(x);
  const Vector gf = f.grad(x);
  const Vector gg = g.grad(x);
  const Matrix cross = gf * gg.transpose();
  return f.H / gv - (cross + cross.transpose()) / (gv * gv) + 2.0 * fv * gg * gg.transpose() / (gv * gv * gv) -
         fv * g.H / (gv * gv);
}

Matrix power_reference(const Quad& f, unsigned p, const Vector& x) {
  const double fv = f.value(x);
  const Vector gf = f.grad(x);
  return p * std::pow(fv, p - 1.0) * f.H + p * (p - 1.0) * std::pow(fv, p - 2.0) * gf * gf.transpose();
}

double rel_gap(const Matrix& a, const Matrix& ref) { return (a - ref).norm() / (1.0 + ref.norm()); }

}  // namespace

TEST(CalculusHessian, SimplexProductIsExactOnAffineInputs) {
  oracle::Gen gen(20);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen.integer(1, 6);
    const Vector af = gen.vector(n, -3.0, 3.0);
    const Vector ag = gen.vector(n, -3.0, 3.0);
    const double cf = gen.uniform(-3.0, 3.0);
    const double cg = gen.uniform(-3.0, 3.0);
    EvaluationCache f([&](const Vector& x) { return cf + af.dot(x); });
    EvaluationCache g([&](const Vector& x) { return cg + ag.dot(x); });
    const DirectionSet S(gen.invertible(n) * 0.1);
    const DirectionSet T(gen.matrix(n, n + gen.integer(0, 2), -0.1, 0.1));
    if (dfh::linalg::rank(T.matrix(), 1e-10) < static_cast<std::size_t>(n)) continue;
    const Vector x0 = gen.vector(n);
    const auto res = dfh::product_hessian(f, g, x0, S, T, CalcMode::simplex);
    const Matrix ref = af * ag.transpose() + ag * af.transpose();
    EXPECT_LE((res.hessian - ref).norm(), 1e-8 * (1.0 + ref.norm()));
  }
}

TEST(CalculusHessian, QuadraticModeIsExactOnQuadraticInputs) {
  oracle::Gen gen(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen.integer(1, 5);
    const Quad qf = random_quad(gen, n);
    Quad qg = random_quad(gen, n);
    const Vector x0 = gen.vector(n);
    if (std::abs(qg.value(x0)) < 0.5) qg.c += qg.value(x0) < 0 ? -1.0 : 1.0;
    ASSERT_GE(std::abs(qg.value(x0)), 0.5);
    const DirectionSet S(gen.invertible(n) * 0.2);
    const DirectionSet T = dfh::build_uk(S, static_cast<std::size_t>(gen.integer(0, n)));

    EvaluationCache f([&](const Vector& x) { return qf.value(x); });
    EvaluationCache g([&](const Vector& x) { return qg.value(x); });
    EXPECT_LE(rel_gap(dfh::product_hessian(f, g, x0, S, T, CalcMode::quadratic).hessian,
                      product_reference(qf, qg, x0)),
              1e-7);
    EXPECT_LE(rel_gap(dfh::quotient_hessian(f, g, x0, S, T, CalcMode::quadratic).hessian,
                      quotient_reference(qf, qg, x0)),
              1e-7);
    const unsigned p = static_cast<unsigned>(gen.integer(2, 4));
    EXPECT_LE(rel_gap(dfh::power_hessian(f, x0, S, T, p, CalcMode::quadratic).hessian, power_reference(qf, p, x0)),
              1e-7);
  }
}

TEST(CalculusHessian, FrozenPlaneExamples) {
  const auto sets = dfh::canonical_set(2, 0, 0.1);
  const Vector x0 = v2(1, 1);
  EvaluationCache f([](const Vector& x) { return x[0] * x[0]; });
  EvaluationCache g([](const Vector& x) { return x[1] * x[1]; });
  const auto prod = dfh::product_hessian(f, g, x0, sets.S, sets.T, CalcMode::quadratic);
  EXPECT_LT((prod.hessian - (Matrix(2, 2) << 2, 4, 4, 2).finished()).norm(), 1e-10);

  EvaluationCache h([](const Vector& x) { return x[0] + x[1] * x[1]; });
  const auto pw = dfh::power_hessian(h, x0, sets.S, sets.T, 2, CalcMode::quadratic);
  EXPECT_LT((pw.hessian - (Matrix(2, 2) << 2, 4, 4, 16).finished()).norm(), 1e-10);
}

TEST(CalculusHessian, UnitFactorReducesToNestedSetHessian) {
  oracle::Gen gen(22);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = gen.integer(1, 4);
    const Vector w = gen.vector(n);
    const auto fn = [&](const Vector& x) { return std::sin(w.dot(x)) + x.squaredNorm(); };
    const DirectionSet S(gen.invertible(n) * 0.1);
    const DirectionSet T(gen.invertible(n) * 0.05);
    const Vector x0 = gen.vector(n);
    EvaluationCache f(fn);
    EvaluationCache one([](const Vector&) { return 1.0; });
    EvaluationCache plain(fn);
    const auto prod = dfh::product_hessian(f, one, x0, S, T, CalcMode::simplex);
    const auto quot = dfh::quotient_hessian(f, one, x0, S, T, CalcMode::simplex);
    const auto nsh = dfh::nested_set_hessian(x0, S, T, plain);
    EXPECT_LT((prod.hessian - nsh.hessian).norm(), 1e-12 * (1.0 + nsh.hessian.norm()));
    EXPECT_LT((quot.hessian - nsh.hessian).norm(), 1e-12 * (1.0 + nsh.hessian.norm()));
  }
}

TEST(CalculusHessian, QuotientOfSquareOverShiftedSquareWithinBound) {
  // f = x^2, g = 1 + x^2 near x = 2; both quadratic, so only gradient error enters.
  EvaluationCache f([](const Vector& x) { return x[0] * x[0]; });
  EvaluationCache g([](const Vector& x) { return 1.0 + x[0] * x[0]; });
  const Vector x0 = (Vector(1) << 2.0).finished();
  const double exact = (2.0 - 6.0 * 4.0) / std::pow(5.0, 3);  // (2 - 6x^2)/(1 + x^2)^3
  for (double beta : {0.1, 0.05, 0.01}) {
    const DirectionSet S(Matrix::Constant(1, 1, beta));
    const DirectionSet T(Matrix::Constant(1, 1, beta));
    const auto res = dfh::quotient_hessian(f, g, x0, S, T, CalcMode::simplex);
    dfh::CalculusBoundInputs in;
    in.m = 1;
    in.k = 1;
    in.delta_S = beta;
    in.delta_T = beta;
    in.norm_S_pinv = 1.0;
    in.norm_T_pinv = 1.0;
    in.f = {4.0, 2.0, 0.0, 4.0, std::nullopt, std::nullopt, std::nullopt};
    in.g = {5.0, 2.0, 0.0, 4.0, std::nullopt, std::nullopt, std::nullopt};
    const double bound = dfh::calculus_error_bound(CalcRule::quotient, CalcMode::simplex, in);
    const double err = std::abs(res.hessian(0, 0) - exact);
    EXPECT_LE(err, bound) << beta;
    EXPECT_GT(err, 0.0);
  }
}

TEST(CalculusHessian, ConstantBaseGivesZeroPowerHessian) {
  const auto sets = dfh::canonical_set(3, 2, 0.1);
  EvaluationCache f([](const Vector&) { return 1.7; });
  for (CalcMode mode : {CalcMode::simplex, CalcMode::quadratic}) {
    EXPECT_LT(dfh::power_hessian(f, Vector::Ones(3), sets.S, sets.T, 3, mode).hessian.norm(), 1e-12);
  }
}

TEST(CalculusHessian, GuardsAndCounts) {
  const auto sets = dfh::canonical_set(2, 1, 0.1);
  EvaluationCache f([](const Vector& x) { return x.sum(); });
  EvaluationCache g([](const Vector& x) { return x[0] - x[1]; });
  EXPECT_THROW(dfh::quotient_hessian(f, g, v2(1, 1), sets.S, sets.T, CalcMode::simplex), dfh::DivisionByZeroError);
  EXPECT_THROW(dfh::power_hessian(f, v2(1, 1), sets.S, sets.T, 1, CalcMode::simplex), std::invalid_argument);

  EvaluationCache a([](const Vector& x) { return std::exp(x[0]) * x[1]; });
  EvaluationCache b([](const Vector& x) { return 2.0 + std::cos(x[1]); });
  const auto res = dfh::product_hessian(a, b, v2(0.3, 0.2), sets.S, sets.T, CalcMode::quadratic);
  EXPECT_EQ(res.eval_count, 12u);

  const DirectionSet S(Matrix::Identity(2, 2) * 0.1);
  const DirectionSet T(Matrix::Identity(2, 2) * 0.07);
  EvaluationCache c([](const Vector& x) { return x.squaredNorm(); });
  EXPECT_THROW(dfh::estimate_component(v2(0, 0), S, T, c, CalcMode::quadratic), dfh::NotPoisedError);
}

namespace {

dfh::CalculusBoundInputs generic_inputs() {
  dfh::CalculusBoundInputs in;
  in.m = 2;
  in.k = 2;
  in.delta_S = 0.1;
  in.delta_T = 0.05;
  in.norm_S_pinv = 1.3;
  in.norm_T_pinv = 1.1;
  in.num_points = 6;
  in.norm_basis_inverse = 4.0;
  in.f = {1.5, 2.0, 3.0, 0.7, 0.8, std::nullopt, std::nullopt};
  in.g = {-2.5, 1.0, 5.0, 1.9, 2.1, std::nullopt, std::nullopt};
  return in;
}

}  // namespace

TEST(CalculusBound, ProductIsSymmetricInItsFactors) {
  auto in = generic_inputs();
  auto swapped = in;
  std::swap(swapped.f, swapped.g);
  for (CalcMode mode : {CalcMode::simplex, CalcMode::quadratic}) {
    const double a = dfh::calculus_error_bound(CalcRule::product, mode, in);
    const double b = dfh::calculus_error_bound(CalcRule::product, mode, swapped);
    EXPECT_NEAR(a, b, 1e-14 * a);
    EXPECT_GT(a, 0.0);
  }
}

TEST(CalculusBound, MinimumOverCandidates) {
  dfh::CalculusBoundInputs in;
  in.m = 2;
  in.k = 2;
  in.delta_S = 0.1;
  in.delta_T = 0.1;
  in.f = {0.0, 1.0, 1.0, 1.0, 0.5, 0.0, 1.0};
  in.g = {0.0, 1.0, 1.0, 1.0, 2.0, 0.0, 1.0};
  // min{0.1 + 1 + 1, |grad_s g| + 1, |grad_s f| + 1} = 1.5, doubled and times delta_u.
  EXPECT_NEAR(dfh::calculus_error_bound(CalcRule::product, CalcMode::simplex, in), 2.0 * 1.5 * 0.1, 1e-15);
  in.f.approx_gradient_norm.reset();
  in.g.approx_gradient_norm.reset();
  EXPECT_NEAR(dfh::calculus_error_bound(CalcRule::product, CalcMode::simplex, in), 2.0 * 2.1 * 0.1, 1e-15);

  EXPECT_EQ(dfh::candidate_minimum({std::nullopt, 3.0, 2.0}), 2.0);
  EXPECT_THROW(dfh::candidate_minimum({std::nullopt, std::nullopt}), std::invalid_argument);
}

TEST(CalculusBound, VanishesWithLipschitzConstants) {
  auto in = generic_inputs();
  in.f.lipschitz_grad = 0.0;
  in.f.lipschitz_hess = 0.0;
  in.g.lipschitz_grad = 0.0;
  in.g.lipschitz_hess = 0.0;
  for (CalcRule rule : {CalcRule::product, CalcRule::quotient, CalcRule::power}) {
    EXPECT_EQ(dfh::calculus_error_bound(rule, CalcMode::simplex, in), 0.0);
    EXPECT_EQ(dfh::calculus_error_bound(rule, CalcMode::quadratic, in), 0.0);
  }
}

TEST(CalculusBound, RejectsMissingInputs) {
  auto in = generic_inputs();
  in.f.lipschitz_hess.reset();
  EXPECT_THROW(dfh::calculus_error_bound(CalcRule::product, CalcMode::simplex, in), std::invalid_argument);
  in = generic_inputs();
  in.g.lipschitz_grad.reset();
  EXPECT_THROW(dfh::calculus_error_bound(CalcRule::quotient, CalcMode::simplex, in), std::invalid_argument);
  EXPECT_NO_THROW(dfh::calculus_error_bound(CalcRule::power, CalcMode::simplex, in));
  in = generic_inputs();
  in.delta_T = 0.0;
  EXPECT_THROW(dfh::calculus_error_bound(CalcRule::power, CalcMode::simplex, in), std::invalid_argument);
  in = generic_inputs();
  in.num_points = 0;
  EXPECT_THROW(dfh::calculus_error_bound(CalcRule::power, CalcMode::quadratic, in), std::invalid_argument);
  in = generic_inputs();
  in.g.value = 0.0;
  EXPECT_THROW(dfh::calculus_error_bound(CalcRule::quotient, CalcMode::simplex, in), dfh::DivisionByZeroError);
}

TEST(CalculusBound, ConstantsMatchClosedForms) {
  EXPECT_NEAR(dfh::e_grad_simplex(4, 3.0, 2.0), 6.0, 1e-15);
  EXPECT_NEAR(dfh::e_hess_nested(2, 2, 6.0, 0.2, 0.1, 1.0, 1.0), 2.0 * std::sqrt(2.0) / 3.0 * 6.0 * 7.0, 1e-12);
  EXPECT_THROW(dfh::e_hess_nested(2, 2, 6.0, 0.2, 0.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_NEAR(dfh::e_grad_model(6, 1.0, 1.0), 6.0 * (1.0 + std::sqrt(2.0)) * std::sqrt(6.0), 1e-12);
}

TEST(CalculusBound, ProductWithUnitFactorMatchesNestedSetBound) {
  const auto sets = dfh::canonical_set(3, 1, 0.1);
  const auto nf = dfh::norm_factors(sets.S, sets.T);
  dfh::CalculusBoundInputs in;
  in.m = 3;
  in.k = 3;
  in.delta_S = sets.S.radius();
  in.delta_T = sets.T.radius();
  in.norm_S_pinv = nf.S_pinv;
  in.norm_T_pinv = nf.T_pinv;
  in.f = {2.0, 1.0, 4.0, 1.0, 1.0, std::nullopt, std::nullopt};
  in.g = {1.0, 0.0, 0.0, 0.0, 0.0, std::nullopt, std::nullopt};
  const double nsh = dfh::error_bound_nsh(dfh::make_bound_inputs(sets.S, sets.T, 1.0, 4.0));
  EXPECT_NEAR(dfh::calculus_error_bound(CalcRule::product, CalcMode::simplex, in), nsh, 1e-12 * nsh);
}

class CompositeDecay : public ::testing::TestWithParam<std::string> {};

TEST_P(CompositeDecay, OrderOneAndWithinBound) {
  const std::string rule = GetParam().substr(0, GetParam().find('('));
  for (const char* suffix : {"-sc", "-qc"}) {
    dfh::StudyConfig cfg;
    cfg.function = GetParam();
    cfg.dim = 3;
    cfg.k = 1;
    cfg.beta_start = 0.1;
    cfg.beta_steps = 8;
    cfg.estimator = dfh::parse_estimator(rule + suffix);
    const auto report = dfh::run_study(cfg);
    ASSERT_TRUE(report.fitted_order.has_value()) << suffix;
    EXPECT_GE(*report.fitted_order, 0.9) << suffix;
    EXPECT_LE(*report.fitted_order, 2.1) << suffix;
    for (const auto& row : report.rows) EXPECT_LE(row.error_spec, row.bound) << suffix << " beta=" << row.beta;
  }
}

INSTANTIATE_TEST_SUITE_P(Registry, CompositeDecay,
                         ::testing::Values("product(exp-of-sum,sum-of-cubes)", "quotient(sum-of-cubes,shifted-sphere)",
                                           "power(exp-of-sum,3)", "product(rosenbrock,shifted-sphere)"),
                         [](const auto& info) { return "case" + std::to_string(info.index); });
