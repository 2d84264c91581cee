#include "dfh/calculus.hpp"

#include "dfh/errors.hpp"
#include "dfh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dfh {

namespace {

using Opt = std::optional<double>;

Opt operator*(Opt a, Opt b) { return (a && b) ? Opt(*a * *b) : std::nullopt; }
Opt operator+(Opt a, Opt b) { return (a && b) ? Opt(*a + *b) : std::nullopt; }

HessianResult wrap(Matrix h, const DirectionSet& S, const DirectionSet& T, std::size_t evals, bool symmetrize) {
  HessianResult r;
  r.hessian = symmetrize ? Matrix(0.5 * (h + h.transpose())) : std::move(h);
  r.delta_u = std::max(S.radius(), T.radius());
  r.delta_l = std::min(S.radius(), T.radius());
  r.eval_count = evals;
  r.symmetrized = symmetrize;
  return r;
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}

void check_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
}

// E constants of one function, resolved from overrides or Lipschitz data.
struct Constants {
  double e_hess;
  double e_grad;
};

Constants resolve(const FunctionBoundData& d, CalcMode mode, const CalculusBoundInputs& in, double delta_u,
                  double delta_l, const char* name) {
  Constants c{};
  if (d.e_hess) {
    check_nonnegative(*d.e_hess, "e_hess");
    c.e_hess = *d.e_hess;
  } else {
    if (!d.lipschitz_hess) {
      throw std::invalid_argument(std::string("calculus_error_bound: Hessian Lipschitz constant of ") + name +
                                  " is required");
    }
    c.e_hess = e_hess_nested(in.m, in.k, *d.lipschitz_hess, delta_u, delta_l, in.norm_S_pinv, in.norm_T_pinv);
  }
  if (d.e_grad) {
    check_nonnegative(*d.e_grad, "e_grad");
    c.e_grad = *d.e_grad;
  } else if (mode == CalcMode::simplex) {
    if (!d.lipschitz_grad) {
      throw std::invalid_argument(std::string("calculus_error_bound: gradient Lipschitz constant of ") + name +
                                  " is required");
    }
    c.e_grad = e_grad_simplex(in.k, *d.lipschitz_grad, in.norm_T_pinv);
  } else {
    if (!d.lipschitz_hess) {
      throw std::invalid_argument(std::string("calculus_error_bound: Hessian Lipschitz constant of ") + name +
                                  " is required");
    }
    if (in.num_points == 0 || !(in.norm_basis_inverse > 0.0)) {
      throw std::invalid_argument("calculus_error_bound: quadratic mode needs num_points and norm_basis_inverse");
    }
    c.e_grad = e_grad_model(in.num_points, *d.lipschitz_hess, in.norm_basis_inverse);
  }
  return c;
}

}  // namespace

ComponentEstimate estimate_component(const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                                     EvaluationCache& cache, CalcMode mode, bool symmetrize,
                                     const NumericSettings& settings) {
  ComponentEstimate c;
  c.hessian = nested_set_hessian(x0, S, T, cache, symmetrize, settings);
  c.value = cache.evaluate(x0);
  const PointSet pts = nshc_points(x0, S, T, settings);
  c.num_points = pts.size();
  if (mode == CalcMode::simplex) {
    c.gradient = simplex_gradient(x0, T, cache, settings).gradient;
    return c;
  }

  const std::size_t p = quadratic_basis_size(S.dim());
  if (pts.size() != p) {
    throw NotPoisedError("quadratic mode: evaluation set has " + std::to_string(pts.size()) +
                         " distinct points, " + std::to_string(p) + " required");
  }
  std::vector<double> values;
  values.reserve(p);
  for (const auto& y : pts.points()) values.push_back(cache.evaluate(y));
  c.model = interpolate_general(pts, values, x0, settings);
  c.gradient = model_gradient(*c.model, x0);

  const Matrix qhat = quadratic_basis_matrix(pts.points(), x0, S.radius() + T.radius());
  c.norm_basis_inverse = linalg::spectral_norm(linalg::pseudoinverse(qhat, settings));
  return c;
}

Matrix combine_product(const ComponentEstimate& f, const ComponentEstimate& g) {
  const Matrix cross = f.gradient * g.gradient.transpose();
  return f.hessian.hessian * g.value + cross + cross.transpose() + g.hessian.hessian * f.value;
}

Matrix combine_quotient(const ComponentEstimate& f, const ComponentEstimate& g) {
  const double gv = g.value;
  const double fv = f.value;
  const Matrix cross = f.gradient * g.gradient.transpose();
  const Matrix gg = g.gradient * g.gradient.transpose();
  const Matrix num = gv * (gv * f.hessian.hessian - fv * g.hessian.hessian) + 2.0 * fv * gg -
                     gv * (cross + cross.transpose());
  return num / (gv * gv * gv);
}

Matrix combine_power(const ComponentEstimate& f, unsigned p) {
  if (p < 2) throw std::invalid_argument("power rule needs p >= 2");
  const double dp = p;
  const double fv = f.value;
  return dp * std::pow(fv, dp - 1.0) * f.hessian.hessian +
         dp * (dp - 1.0) * std::pow(fv, dp - 2.0) * (f.gradient * f.gradient.transpose());
}

HessianResult product_hessian(EvaluationCache& f, EvaluationCache& g, const Vector& x0, const DirectionSet& S,
                              const DirectionSet& T, CalcMode mode, bool symmetrize,
                              const NumericSettings& settings) {
  const std::size_t before = f.distinct_count() + g.distinct_count();
  const ComponentEstimate cf = estimate_component(x0, S, T, f, mode, symmetrize, settings);
  const ComponentEstimate cg = estimate_component(x0, S, T, g, mode, symmetrize, settings);
  return wrap(combine_product(cf, cg), S, T, f.distinct_count() + g.distinct_count() - before, symmetrize);
}

HessianResult quotient_hessian(EvaluationCache& f, EvaluationCache& g, const Vector& x0, const DirectionSet& S,
                               const DirectionSet& T, CalcMode mode, bool symmetrize,
                               const NumericSettings& settings) {
  const std::size_t before = f.distinct_count() + g.distinct_count();
  const double gv = g.evaluate(x0);
  if (!(std::abs(gv) > settings.zero_value_tol)) {
    throw DivisionByZeroError("quotient rule: denominator vanishes at x0");
  }
  const ComponentEstimate cf = estimate_component(x0, S, T, f, mode, symmetrize, settings);
  const ComponentEstimate cg = estimate_component(x0, S, T, g, mode, symmetrize, settings);
  return wrap(combine_quotient(cf, cg), S, T, f.distinct_count() + g.distinct_count() - before, symmetrize);
}

HessianResult power_hessian(EvaluationCache& f, const Vector& x0, const DirectionSet& S, const DirectionSet& T,
                            unsigned p, CalcMode mode, bool symmetrize, const NumericSettings& settings) {
  if (p < 2) throw std::invalid_argument("power rule needs p >= 2");
  const std::size_t before = f.distinct_count();
  const ComponentEstimate cf = estimate_component(x0, S, T, f, mode, symmetrize, settings);
  return wrap(combine_power(cf, p), S, T, f.distinct_count() - before, symmetrize);
}

double e_grad_simplex(std::size_t k, double L_grad, double norm_T_pinv) {
  check_nonnegative(L_grad, "L_grad");
  check_nonnegative(norm_T_pinv, "norm_T_pinv");
  return std::sqrt(static_cast<double>(k)) / 2.0 * L_grad * norm_T_pinv;
}

double e_hess_nested(std::size_t m, std::size_t k, double L_hess, double delta_u, double delta_l,
                     double norm_S_pinv, double norm_T_pinv) {
  check_nonnegative(L_hess, "L_hess");
  check_positive(delta_l, "delta_l");
  check_positive(delta_u, "delta_u");
  if (delta_l > delta_u) throw std::invalid_argument("e_hess_nested: delta_l exceeds delta_u");
  check_nonnegative(norm_S_pinv, "norm_S_pinv");
  check_nonnegative(norm_T_pinv, "norm_T_pinv");
  return static_cast<double>(m) * std::sqrt(static_cast<double>(k)) / 3.0 * L_hess *
         (2.0 * delta_u / delta_l + 3.0) * norm_S_pinv * norm_T_pinv;
}

double e_grad_model(std::size_t num_points, double L_hess, double norm_basis_inverse) {
  check_nonnegative(L_hess, "L_hess");
  check_nonnegative(norm_basis_inverse, "norm_basis_inverse");
  return 6.0 * (1.0 + std::sqrt(2.0)) * std::sqrt(static_cast<double>(num_points)) * L_hess * norm_basis_inverse;
}

double candidate_minimum(std::initializer_list<std::optional<double>> candidates) {
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& c : candidates) {
    if (!c) continue;
    any = true;
    best = std::min(best, *c);
  }
  if (!any) throw std::invalid_argument("calculus_error_bound: no candidate of an M-minimum is computable");
  return best;
}

double calculus_error_bound(CalcRule rule, CalcMode mode, const CalculusBoundInputs& in) {
  check_positive(in.delta_S, "delta_S");
  check_positive(in.delta_T, "delta_T");
  const double du = std::max(in.delta_S, in.delta_T);
  const double dl = std::min(in.delta_S, in.delta_T);
  // Gradient substitutes carry error E * du^r.
  const double r = mode == CalcMode::simplex ? 1.0 : 2.0;
  const double dr = std::pow(du, r);
  const double dr1 = std::pow(du, r - 1.0);

  const FunctionBoundData& f = in.f;
  const Constants cf = resolve(f, mode, in, du, dl, "f");
  const Opt ef = cf.e_grad;
  const Opt nf = f.true_gradient_norm;
  const Opt af = f.approx_gradient_norm;

  if (rule == CalcRule::power) {
    if (in.power < 2) throw std::invalid_argument("calculus_error_bound: power must be >= 2");
    const double p = in.power;
    const double m = candidate_minimum({ef * Opt(dr) + Opt(2.0) * nf, af + nf});
    return (p * std::abs(std::pow(f.value, p - 1.0)) * cf.e_hess +
            p * (p - 1.0) * cf.e_grad * std::abs(std::pow(f.value, p - 2.0)) * m * dr1) *
           du;
  }

  const FunctionBoundData& g = in.g;
  const Constants cg = resolve(g, mode, in, du, dl, "g");
  const Opt eg = cg.e_grad;
  const Opt ng = g.true_gradient_norm;
  const Opt ag = g.approx_gradient_norm;

  const double m_fg = candidate_minimum({
      ef * eg * Opt(dr) + eg * nf + ef * ng,
      ef * ag + eg * nf,
      eg * af + ef * ng,
  });

  if (rule == CalcRule::product) {
    return (cf.e_hess * std::abs(g.value) + cg.e_hess * std::abs(f.value) + 2.0 * m_fg * dr1) * du;
  }

  const double gv = std::abs(g.value);
  if (!(gv > 0.0)) throw DivisionByZeroError("calculus_error_bound: denominator vanishes at x0");
  const double fv = std::abs(f.value);
  const double m_gg = candidate_minimum({
      eg * eg * Opt(dr) + Opt(2.0) * eg * ng,
      eg * ag + eg * ng,
  });
  return (cf.e_hess * gv * gv + cg.e_hess * fv * gv + 2.0 * (gv * m_fg + fv * m_gg) * dr1) * du / (gv * gv * gv);
}

}  // namespace dfh
