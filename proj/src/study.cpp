#include "dfh/study.hpp"

#include "dfh/approx.hpp"
#include "dfh/errors.hpp"
#include "dfh/eval.hpp"
#include "dfh/linalg.hpp"
#include "dfh/sets.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>

namespace dfh {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct EstimatorInfo {
  Estimator e;
  const char* name;
};

constexpr EstimatorInfo kEstimators[] = {
    {Estimator::nested_set, "nested-set"},   {Estimator::product_sc, "product-sc"},
    {Estimator::product_qc, "product-qc"},   {Estimator::quotient_sc, "quotient-sc"},
    {Estimator::quotient_qc, "quotient-qc"}, {Estimator::power_sc, "power-sc"},
    {Estimator::power_qc, "power-qc"},
};

CalcMode mode_of(Estimator e) {
  switch (e) {
    case Estimator::product_qc:
    case Estimator::quotient_qc:
    case Estimator::power_qc:
      return CalcMode::quadratic;
    default:
      return CalcMode::simplex;
  }
}

TestFunction::Kind kind_of(Estimator e) {
  switch (e) {
    case Estimator::product_sc:
    case Estimator::product_qc:
      return TestFunction::Kind::product;
    case Estimator::quotient_sc:
    case Estimator::quotient_qc:
      return TestFunction::Kind::quotient;
    case Estimator::power_sc:
    case Estimator::power_qc:
      return TestFunction::Kind::power;
    default:
      return TestFunction::Kind::base;
  }
}

// Rounding in the function values, amplified by the difference quotients of
// the nested-set Hessian.
double hessian_roundoff(double sup_value, const DirectionSet& S, const DirectionSet& T, const NormFactors& nf) {
  const double mk = static_cast<double>(S.size() * T.size());
  return 32.0 * std::sqrt(mk) * kEps * sup_value * nf.S_pinv * nf.T_pinv / (S.radius() * T.radius());
}

FunctionBoundData bound_data(const TestFunction& fn, const ComponentEstimate& c, const DerivativeEnvelope& env,
                             const Vector& x0) {
  FunctionBoundData d;
  d.value = c.value;
  d.lipschitz_grad = env.sup_hessian;
  d.lipschitz_hess = env.lip_hessian;
  d.true_gradient_norm = fn.gradient(x0).norm();
  d.approx_gradient_norm = c.gradient.norm();
  return d;
}

void check_dims(const TestFunction& fn, const Vector& x0, const DirectionSet& S, const DirectionSet& T) {
  if (static_cast<std::size_t>(x0.size()) != fn.dim || S.dim() != fn.dim || T.dim() != fn.dim) {
    throw std::invalid_argument("dimension mismatch between function, x0 and direction sets");
  }
}

}  // namespace

Estimator parse_estimator(const std::string& name) {
  for (const auto& info : kEstimators) {
    if (name == info.name) return info.e;
  }
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

std::string estimator_name(Estimator e) {
  for (const auto& info : kEstimators) {
    if (info.e == e) return info.name;
  }
  return "unknown";
}

bool ConvergenceReport::within_bounds() const {
  for (const auto& r : rows) {
    if (!(r.error_spec <= r.bound + r.noise_floor)) return false;
  }
  return true;
}

std::vector<double> beta_schedule(double start, double ratio, std::size_t steps) {
  if (!(start > 0.0) || !std::isfinite(start)) throw std::invalid_argument("beta start must be positive");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("beta ratio must lie in (0, 1)");
  if (steps == 0) throw std::invalid_argument("beta steps must be positive");
  std::vector<double> out;
  out.reserve(steps);
  double b = start;
  for (std::size_t i = 0; i < steps; ++i) {
    out.push_back(b);
    b *= ratio;
  }
  return out;
}

std::pair<double, double> least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs two or more points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least squares needs distinct abscissae");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

EstimateOutcome run_estimate(const TestFunction& fn, Estimator estimator, const Vector& x0, const DirectionSet& S,
                             const DirectionSet& T, bool symmetrize, NormKind norm,
                             const NumericSettings& settings) {
  check_dims(fn, x0, S, T);
  const double radius = S.radius() + T.radius();
  const NormFactors nf = norm_factors(S, T, norm);
  EstimateOutcome out;
  out.reference = fn.hessian(x0);
  const double floor_base = 1e-12 * (1.0 + linalg::spectral_norm(out.reference));

  if (estimator == Estimator::nested_set) {
    EvaluationCache cache = EvaluationCache::for_sets(fn.oracle(), x0, S, T, settings);
    out.result = nested_set_hessian(x0, S, T, cache, symmetrize, settings);
    const DerivativeEnvelope env = fn.envelope(x0, radius);
    out.bound = error_bound_nsh(make_bound_inputs(S, T, env.sup_hessian, env.lip_hessian, norm));
    out.noise_floor = std::max(floor_base, hessian_roundoff(env.sup_value, S, T, nf));
    out.evals = cache.distinct_count();
    return out;
  }

  if (fn.kind != kind_of(estimator)) {
    throw std::invalid_argument("estimator " + estimator_name(estimator) + " does not match function " + fn.name);
  }
  const CalcMode mode = mode_of(estimator);
  const TestFunction& a = *fn.parts[0];
  EvaluationCache ca = EvaluationCache::for_sets(a.oracle(), x0, S, T, settings);
  const DerivativeEnvelope env_a = a.envelope(x0, radius);
  const double r_a = hessian_roundoff(env_a.sup_value, S, T, nf);

  CalculusBoundInputs in;
  in.m = S.size();
  in.k = T.size();
  in.delta_S = S.radius();
  in.delta_T = T.radius();
  in.norm_S_pinv = nf.S_pinv;
  in.norm_T_pinv = nf.T_pinv;
  in.power = fn.exponent;

  CalcRule rule = CalcRule::power;
  double roundoff = 0.0;
  std::size_t evals = 0;
  if (fn.kind == TestFunction::Kind::power) {
    out.result = power_hessian(ca, x0, S, T, fn.exponent, mode, symmetrize, settings);
    const ComponentEstimate c = estimate_component(x0, S, T, ca, mode, symmetrize, settings);
    in.f = bound_data(a, c, env_a, x0);
    in.num_points = c.num_points;
    in.norm_basis_inverse = c.norm_basis_inverse;
    const double p = fn.exponent;
    roundoff = p * std::pow(env_a.sup_value, p - 1.0) * r_a;
    evals = ca.distinct_count();
  } else {
    const TestFunction& b = *fn.parts[1];
    EvaluationCache cb = EvaluationCache::for_sets(b.oracle(), x0, S, T, settings);
    const DerivativeEnvelope env_b = b.envelope(x0, radius);
    const double r_b = hessian_roundoff(env_b.sup_value, S, T, nf);
    if (fn.kind == TestFunction::Kind::product) {
      rule = CalcRule::product;
      out.result = product_hessian(ca, cb, x0, S, T, mode, symmetrize, settings);
    } else {
      rule = CalcRule::quotient;
      out.result = quotient_hessian(ca, cb, x0, S, T, mode, symmetrize, settings);
    }
    const ComponentEstimate cfa = estimate_component(x0, S, T, ca, mode, symmetrize, settings);
    const ComponentEstimate cfb = estimate_component(x0, S, T, cb, mode, symmetrize, settings);
    in.f = bound_data(a, cfa, env_a, x0);
    in.g = bound_data(b, cfb, env_b, x0);
    in.num_points = cfa.num_points;
    in.norm_basis_inverse = cfa.norm_basis_inverse;
    const double fa = std::abs(cfa.value);
    const double gb = std::abs(cfb.value);
    roundoff = rule == CalcRule::product ? gb * r_a + fa * r_b : r_a / gb + fa * r_b / (gb * gb);
    evals = ca.distinct_count() + cb.distinct_count();
  }
  out.bound = calculus_error_bound(rule, mode, in);
  out.noise_floor = std::max(floor_base, roundoff);
  out.evals = evals;
  return out;
}

DirectionPair study_sets(const StudyConfig& config, double beta) {
  const std::size_t n = config.dim;
  switch (config.family) {
    case SetFamily::canonical:
      return canonical_set(n, config.k, beta);
    case SetFamily::random: {
      if (config.k > n) throw std::invalid_argument("k must lie in {0, ..., n}");
      std::mt19937_64 rng(config.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      const auto d = static_cast<Eigen::Index>(n);
      Matrix s(d, d);
      for (int attempt = 0;; ++attempt) {
        for (Eigen::Index i = 0; i < d; ++i) {
          for (Eigen::Index j = 0; j < d; ++j) s(i, j) = normal(rng);
        }
        const Eigen::JacobiSVD<Matrix> svd(s);
        const auto& sv = svd.singularValues();
        if (sv[d - 1] > 1e-3 * sv[0]) break;
        if (attempt > 100) throw std::runtime_error("could not draw a well-conditioned direction set");
      }
      const DirectionSet unit(s / DirectionSet(s).radius());
      const DirectionSet S = unit.scaled(beta);
      return {S, build_uk(S, config.k)};
    }
    case SetFamily::fixed:
      if (!config.S || !config.T) throw std::invalid_argument("fixed set family needs both S and T");
      return {DirectionSet(*config.S * beta), DirectionSet(*config.T * beta)};
  }
  throw std::invalid_argument("unknown set family");
}

ConvergenceReport run_study(const StudyConfig& config) {
  if (config.dim == 0) throw std::invalid_argument("dimension must be positive");
  if (config.family != SetFamily::fixed && config.k > config.dim) {
    throw std::invalid_argument("k must lie in {0, ..., n}");
  }
  const std::vector<double> betas = beta_schedule(config.beta_start, config.beta_ratio, config.beta_steps);
  const auto fn = make_function(config.function, config.dim, config.seed);
  if (config.estimator != Estimator::nested_set && fn->kind != kind_of(config.estimator)) {
    throw std::invalid_argument("estimator " + estimator_name(config.estimator) + " does not match function " +
                                fn->name);
  }
  const Vector x0 = config.x0 ? *config.x0 : fn->default_x0;
  if (static_cast<std::size_t>(x0.size()) != config.dim) throw std::invalid_argument("x0 has the wrong dimension");
  if (!linalg::is_finite(x0)) throw std::invalid_argument("x0 must be finite");
  // Validates the set description once before any work starts.
  {
    const DirectionPair probe = study_sets(config, betas.front());
    if (probe.S.dim() != config.dim || probe.T.dim() != config.dim) {
      throw std::invalid_argument("direction sets have the wrong dimension");
    }
  }

  const auto row_at = [&](double beta) {
    try {
      const DirectionPair sets = study_sets(config, beta);
      const EstimateOutcome o =
          run_estimate(*fn, config.estimator, x0, sets.S, sets.T, config.symmetrize, config.norm, config.settings);
      const Matrix diff = o.result.hessian - o.reference;
      StudyRow row;
      row.beta = beta;
      row.error_spec = linalg::spectral_norm(diff);
      row.error_fro = linalg::frobenius_norm(diff);
      row.bound = o.bound;
      row.evals = o.evals;
      row.noise_floor = o.noise_floor;
      return row;
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      throw Error("beta=" + std::to_string(beta) + ": " + e.what());
    }
  };

  ConvergenceReport report;
  report.function = fn->name;
  report.estimator = config.estimator;
  if (config.parallel) {
    std::vector<std::future<StudyRow>> jobs;
    jobs.reserve(betas.size());
    for (double b : betas) jobs.push_back(std::async(std::launch::async, row_at, b));
    for (auto& j : jobs) report.rows.push_back(j.get());
  } else {
    for (double b : betas) report.rows.push_back(row_at(b));
  }

  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& r : report.rows) {
    if (r.error_spec > r.noise_floor) {
      lx.push_back(std::log(r.beta));
      ly.push_back(std::log(r.error_spec));
    }
  }
  report.fitted_rows = lx.size();
  report.exact = lx.empty();
  if (lx.size() >= 2) {
    const auto [intercept, slope] = least_squares_line(lx, ly);
    report.fitted_order = slope;
    report.kappa = std::exp(intercept);
  }
  return report;
}

namespace {

bool same_columns(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  std::vector<bool> used(static_cast<std::size_t>(b.cols()), false);
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    bool found = false;
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      if (!used[static_cast<std::size_t>(j)] && (a.col(i) - b.col(j)).cwiseAbs().maxCoeff() <= tol) {
        used[static_cast<std::size_t>(j)] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

Matrix permutation(const std::vector<int>& order) {
  const auto n = static_cast<Eigen::Index>(order.size());
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(order[static_cast<std::size_t>(i)], i) = 1.0;
  return p;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::vector<ExampleCheck> verify_examples() {
  std::vector<ExampleCheck> out;
  const Vector origin = Vector::Zero(2);

  try {
    ExampleCheck c{"canonical-set-r2", false, ""};
    const DirectionPair sets = canonical_set(2, 2, 1.0);
    const PointSet pts = nshc_points(origin, sets.S, sets.T);
    std::vector<Vector> expected;
    for (const auto& xy : {std::pair{0.0, -1.0}, {0.0, 0.0}, {0.0, 1.0}, {1.0, -1.0}, {1.0, 0.0}, {2.0, -1.0}}) {
      expected.push_back((Vector(2) << xy.first, xy.second).finished());
    }
    const bool points_ok = pts.same_points(PointSet::from_points(expected));
    bool witness_ok = false;
    for (const auto& w : minimal_witnesses(pts, origin)) {
      if (same_columns(w.S.matrix(), sets.S.matrix(), 1e-12) && same_columns(w.T.matrix(), sets.T.matrix(), 1e-12)) {
        witness_ok = true;
      }
    }
    EvaluationCache cache = EvaluationCache::for_sets([](const Vector& x) { return x.squaredNorm(); }, origin,
                                                      sets.S, sets.T);
    nested_set_hessian(origin, sets.S, sets.T, cache);
    const bool count_ok = cache.distinct_count() == 6;
    c.passed = points_ok && witness_ok && count_ok;
    c.detail = "points match: " + yes_no(points_ok) + ", witness (Id, E_2) found: " + yes_no(witness_ok) +
               ", distinct evaluations: " + std::to_string(cache.distinct_count());
    out.push_back(c);
  } catch (const std::exception& e) {
    out.push_back({"canonical-set-r2", false, e.what()});
  }

  try {
    ExampleCheck c{"poised-not-minimal", false, ""};
    std::vector<Vector> xs;
    for (const auto& xy : {std::pair{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}, {-1.0, -1.0}}) {
      xs.push_back((Vector(2) << xy.first, xy.second).finished());
    }
    const PointSet pts = PointSet::from_points(xs);
    const bool poised = is_poised_quadratic(pts);
    const bool minimal = is_minimal_nshc(pts, origin).minimal;
    c.passed = poised && !minimal;
    c.detail = "poised: " + yes_no(poised) + ", minimal: " + yes_no(minimal);
    out.push_back(c);
  } catch (const std::exception& e) {
    out.push_back({"poised-not-minimal", false, e.what()});
  }

  try {
    ExampleCheck c{"transformed-canonical-minimal", true, ""};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const DirectionPair base = canonical_set(2, 2, 1.0);
    int trials = 0;
    int minimal_count = 0;
    for (int t = 0; t < 8; ++t) {
      Matrix n(2, 2);
      do {
        for (Eigen::Index i = 0; i < 4; ++i) n(i) = u(rng);
      } while (std::abs(n.determinant()) < 0.2);
      const Matrix p1 = permutation(t % 2 == 0 ? std::vector<int>{0, 1} : std::vector<int>{1, 0});
      const Matrix p2 = permutation((t / 2) % 2 == 0 ? std::vector<int>{0, 1} : std::vector<int>{1, 0});
      const double scale = t < 4 ? 1.0 : 0.5;
      const DirectionSet S(scale * n * base.S.matrix() * p1);
      const DirectionSet T(scale * n * base.T.matrix() * p2);
      const Vector x0 = (Vector(2) << u(rng), u(rng)).finished();
      const PointSet pts = nshc_points(x0, S, T);
      ++trials;
      if (is_minimal_nshc(pts, x0).minimal) ++minimal_count;
    }
    c.passed = minimal_count == trials;
    c.detail = std::to_string(minimal_count) + "/" + std::to_string(trials) + " transformed sets minimal";
    out.push_back(c);
  } catch (const std::exception& e) {
    out.push_back({"transformed-canonical-minimal", false, e.what()});
  }
  return out;
}

}  // namespace dfh
