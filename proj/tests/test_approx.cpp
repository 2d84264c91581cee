#include "dfh/approx.hpp"
#include "dfh/bounds.hpp"
#include "dfh/errors.hpp"
#include "dfh/linalg.hpp"
#include "dfh/registry.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using dfh::DirectionSet;
using dfh::EvaluationCache;
using dfh::Matrix;
using dfh::Vector;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

EvaluationCache cache_for(const dfh::Oracle& f) { return EvaluationCache(f, 1e-13); }

}  // namespace

TEST(DeltaF, ConstantAffineAndSquare) {
  oracle::Gen gen(1);
  const DirectionSet T(gen.matrix(3, 4));
  const Vector x0 = gen.vector(3);
  auto c1 = cache_for([](const Vector&) { return 4.2; });
  EXPECT_EQ(dfh::delta_f(x0, T, c1), Vector::Zero(4));

  const Vector a = gen.vector(3);
  auto c2 = cache_for([&](const Vector& x) { return a.dot(x) + 7.0; });
  EXPECT_LT((dfh::delta_f(x0, T, c2) - T.matrix().transpose() * a).norm(), 1e-13);

  const double h = 0.3;
  auto c3 = cache_for([](const Vector& x) { return x[0] * x[0]; });
  EXPECT_NEAR(dfh::delta_f(Vector::Zero(1), DirectionSet(Matrix::Constant(1, 1, h)), c3)[0], h * h, 1e-16);
}

TEST(SimplexGradient, AffineIsExact) {
  oracle::Gen gen(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(1, 6);
    const Vector a = gen.vector(n, -5.0, 5.0);
    const DirectionSet T(gen.matrix(n, n + gen.integer(0, 3)));
    if (dfh::linalg::rank(T.matrix(), 1e-8) < static_cast<std::size_t>(n)) continue;
    auto cache = cache_for([&](const Vector& x) { return a.dot(x) - 1.5; });
    const auto g = dfh::simplex_gradient(gen.vector(n), T, cache);
    EXPECT_LT((g.gradient - a).norm(), 1e-9 * (1.0 + a.norm()));
  }
}

TEST(SimplexGradient, SumOfSquaresForwardDifference) {
  const double h = 0.01;
  auto cache = cache_for([](const Vector& x) { return x.squaredNorm(); });
  const DirectionSet T(h * Matrix::Identity(2, 2));
  const auto g = dfh::simplex_gradient(v2(0, 0), T, cache);
  EXPECT_NEAR(g.gradient[0], h, 1e-15);
  EXPECT_NEAR(g.gradient[1], h, 1e-15);
  EXPECT_DOUBLE_EQ(g.set_radius, h);
  EXPECT_EQ(g.eval_count, 3u);
  const double bound = dfh::error_bound_gsg(dfh::make_bound_inputs(T, T, 2.0, 0.0));
  EXPECT_NEAR(g.gradient.norm(), h * std::sqrt(2.0), 1e-15);
  EXPECT_LE(g.gradient.norm(), bound * (1.0 + 1e-12));
}

TEST(SimplexGradient, OverdeterminedLeastSquares) {
  const double h = 0.01;
  Matrix t(2, 3);
  t << 1, 0, 1, 0, 1, 1;
  const DirectionSet T(h * t);
  auto cache = cache_for([](const Vector& x) { return x.squaredNorm(); });
  const auto g = dfh::simplex_gradient(v2(0, 0), T, cache);
  // Normal equations oracle.
  const Matrix tt = T.matrix();
  const Vector delta = (Vector(3) << h * h, h * h, 2 * h * h).finished();
  const Vector expected = oracle::gauss_solve(tt * tt.transpose(), tt * delta);
  EXPECT_LT((g.gradient - expected).norm(), 1e-14);
  EXPECT_LT((g.gradient - v2(h, h)).norm(), 1e-14);
  const double bound = dfh::error_bound_gsg(dfh::make_bound_inputs(T, T, 2.0, 0.0));
  EXPECT_NEAR(bound, 2.0 * std::sqrt(3.0) * h, 1e-14);
  EXPECT_LE(g.gradient.norm(), bound);
}

TEST(SimplexGradient, SquareSetMatchesExplicitInverse) {
  oracle::Gen gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(1, 6);
    const Matrix t = gen.invertible(n) * 0.1;
    const Vector x0 = gen.vector(n);
    auto cache = cache_for([](const Vector& x) { return std::exp(x.sum()) + std::sin(x[0]); });
    const auto g = dfh::simplex_gradient(x0, DirectionSet(t), cache);
    Vector delta(n);
    const double f0 = std::exp(x0.sum()) + std::sin(x0[0]);
    for (int j = 0; j < n; ++j) {
      const Vector y = x0 + t.col(j);
      delta[j] = std::exp(y.sum()) + std::sin(y[0]) - f0;
    }
    const Vector expected = oracle::gauss_solve(t.transpose(), delta);
    EXPECT_LT((g.gradient - expected).norm(), 1e-12 * (1.0 + expected.norm()));
  }
}

TEST(SimplexGradient, RejectsRankDeficientSet) {
  auto cache = cache_for([](const Vector& x) { return x.sum(); });
  Matrix t(2, 2);
  t << 1, 2, 1, 2;
  try {
    dfh::simplex_gradient(v2(0, 0), DirectionSet(t), cache);
    FAIL();
  } catch (const dfh::RankDeficientError& e) {
    EXPECT_EQ(e.set_name(), "T");
    EXPECT_EQ(e.rank(), 1u);
  }
}

TEST(NestedSetHessian, QuadraticIsExact) {
  Matrix H(2, 2);
  H << 2, 1, 1, 4;
  const Vector a = v2(-1.0, 0.5);
  const auto f = [&](const Vector& x) { return 0.5 * x.dot(H * x) + a.dot(x) + 3.0; };
  oracle::Gen gen(4);
  for (int trial = 0; trial < 30; ++trial) {
    const DirectionSet S(gen.matrix(2, 2 + gen.integer(0, 2)) * 0.2);
    const DirectionSet T(gen.matrix(2, 2 + gen.integer(0, 2)) * 0.2);
    if (dfh::linalg::rank(S.matrix(), 1e-6) < 2 || dfh::linalg::rank(T.matrix(), 1e-6) < 2) continue;
    auto cache = cache_for(f);
    const auto r = dfh::nested_set_hessian(gen.vector(2), S, T, cache);
    EXPECT_LT((r.hessian - H).norm(), 1e-7);
  }
}

TEST(NestedSetHessian, AffineGivesZero) {
  auto cache = cache_for([](const Vector& x) { return 3.0 * x[0] - x[1] + 1.0; });
  const auto sets = dfh::canonical_set(2, 1, 0.1);
  EXPECT_LT(dfh::nested_set_hessian(v2(0.3, -0.2), sets.S, sets.T, cache).hessian.norm(), 1e-12);
}

TEST(NestedSetHessian, SumOfCubesCanonicalIdentity) {
  // Frozen: H = diag(6 + 6 beta) at (1, 1), so the error is 6 beta.
  const auto f = [](const Vector& x) { return x.array().cube().sum(); };
  std::vector<double> lb;
  std::vector<double> le;
  for (double beta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto sets = dfh::canonical_set(2, 0, beta);
    auto cache = EvaluationCache::for_sets(f, v2(1, 1), sets.S, sets.T);
    const auto r = dfh::nested_set_hessian(v2(1, 1), sets.S, sets.T, cache);
    EXPECT_NEAR(r.hessian(0, 0), 6.0 + 6.0 * beta, 1e-9 / beta);
    EXPECT_NEAR(r.hessian(0, 1), 0.0, 1e-9 / beta);
    const double err = dfh::linalg::spectral_norm(r.hessian - 6.0 * Matrix::Identity(2, 2));
    EXPECT_NEAR(err, 6.0 * beta, 1e-8 / beta);
    lb.push_back(std::log(beta));
    le.push_back(std::log(err));
  }
  EXPECT_NEAR(oracle::fitted_slope(lb, le), 1.0, 0.01);
}

TEST(NestedSetHessian, CanonicalIdentityEqualsForwardDifferenceStencil) {
  oracle::Gen gen(5);
  const auto f = [](const Vector& x) { return std::exp(0.3 * x.sum()) + x[0] * x[0] * x[x.size() - 1]; };
  for (int n = 1; n <= 5; ++n) {
    for (double h : {0.1, 0.05}) {
      const Vector x0 = gen.vector(n);
      const auto sets = dfh::canonical_set(static_cast<std::size_t>(n), 0, h);
      auto cache = EvaluationCache::for_sets(f, x0, sets.S, sets.T);
      const Matrix H = dfh::nested_set_hessian(x0, sets.S, sets.T, cache).hessian;
      const Matrix ref = oracle::forward_difference_hessian(f, x0, h);
      EXPECT_LT((H - ref).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + ref.cwiseAbs().maxCoeff()))
          << "n=" << n << " h=" << h;
    }
  }
}

TEST(NestedSetHessian, RawOutputIsAsymmetricAndSymmetrizeIsExact) {
  const auto f = [](const Vector& x) { return x[0] * x[0] * x[0] * x[1] + std::sin(x[1]); };
  // Minimal sets reproduce the symmetric model Hessian, so use a generic pair.
  const dfh::DirectionPair sets{DirectionSet(0.1 * Matrix::Identity(2, 2)),
                                DirectionSet((Matrix(2, 2) << 0.05, 0.02, 0.01, 0.06).finished())};
  auto cache = EvaluationCache::for_sets(f, v2(0.7, 0.4), sets.S, sets.T);
  const auto raw = dfh::nested_set_hessian(v2(0.7, 0.4), sets.S, sets.T, cache);
  EXPECT_FALSE(raw.symmetrized);
  EXPECT_GT((raw.hessian - raw.hessian.transpose()).norm(), 1e-6);
  const std::size_t before = cache.distinct_count();
  const auto sym = dfh::nested_set_hessian(v2(0.7, 0.4), sets.S, sets.T, cache, true);
  EXPECT_TRUE(sym.symmetrized);
  EXPECT_EQ(sym.hessian, sym.hessian.transpose());
  EXPECT_EQ(sym.hessian, Matrix(0.5 * (raw.hessian + raw.hessian.transpose())));
  EXPECT_EQ(sym.eval_count, 0u);
  EXPECT_EQ(cache.distinct_count(), before);
}

TEST(NestedSetHessian, RecordsActualRadii) {
  auto cache = cache_for([](const Vector& x) { return x.squaredNorm(); });
  const DirectionSet S(0.2 * Matrix::Identity(2, 2));
  const DirectionSet T(0.1 * Matrix::Identity(2, 2));
  const auto r = dfh::nested_set_hessian(v2(0, 0), S, T, cache);
  EXPECT_DOUBLE_EQ(r.delta_u, 0.2);
  EXPECT_DOUBLE_EQ(r.delta_l, 0.1);
  EXPECT_EQ(r.eval_count, 9u);
}

TEST(NestedSetHessian, NamesTheDeficientSet) {
  auto cache = cache_for([](const Vector& x) { return x.squaredNorm(); });
  Matrix bad(2, 2);
  bad << 1, 1, 0, 0;
  const DirectionSet good(Matrix::Identity(2, 2));
  try {
    dfh::nested_set_hessian(v2(0, 0), DirectionSet(bad), good, cache);
    FAIL();
  } catch (const dfh::RankDeficientError& e) {
    EXPECT_EQ(e.set_name(), "S");
  }
  try {
    dfh::nested_set_hessian(v2(0, 0), good, DirectionSet(bad), cache);
    FAIL();
  } catch (const dfh::RankDeficientError& e) {
    EXPECT_EQ(e.set_name(), "T");
  }
}

TEST(NestedSetHessian, ErrorStaysBelowBoundOnRegistryFunctions) {
  oracle::Gen gen(6);
  for (const char* name : {"sum-of-cubes", "exp-of-sum", "rosenbrock", "product(sum-of-cubes,exp-of-sum)"}) {
    for (std::size_t n : {2u, 3u}) {
      const auto fn = dfh::make_function(name, n);
      for (int trial = 0; trial < 4; ++trial) {
        const Matrix s = gen.invertible(static_cast<Eigen::Index>(n));
        for (double beta : {1e-1, 1e-2, 1e-3}) {
          const DirectionSet S(s * beta);
          const DirectionSet T = dfh::build_uk(S, static_cast<std::size_t>(trial) % (n + 1));
          auto cache = EvaluationCache::for_sets(fn->oracle(), fn->default_x0, S, T);
          const auto r = dfh::nested_set_hessian(fn->default_x0, S, T, cache);
          const auto env = fn->envelope(fn->default_x0, S.radius() + T.radius());
          const double bound =
              dfh::error_bound_nsh(dfh::make_bound_inputs(S, T, env.sup_hessian, env.lip_hessian));
          const double err = dfh::linalg::spectral_norm(r.hessian - fn->hessian(fn->default_x0));
          EXPECT_LE(err, bound) << name << " n=" << n << " beta=" << beta;
        }
      }
    }
  }
}
