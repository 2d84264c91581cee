// Command-line front end: convergence studies, worked-example checks and
// one-shot Hessian estimates.

#include "dfh/approx.hpp"
#include "dfh/bounds.hpp"
#include "dfh/errors.hpp"
#include "dfh/eval.hpp"
#include "dfh/io.hpp"
#include "dfh/linalg.hpp"
#include "dfh/quadmodel.hpp"
#include "dfh/registry.hpp"
#include "dfh/sets.hpp"
#include "dfh/study.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

using nlohmann::json;

json to_json(const dfh::Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const dfh::Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(dfh::Vector(m.row(i).transpose())));
  return a;
}

json model_json(const dfh::QuadraticModel& q) {
  json upper = json::array();
  for (Eigen::Index i = 0; i < q.H.rows(); ++i) {
    for (Eigen::Index j = i; j < q.H.cols(); ++j) upper.push_back(q.H(i, j));
  }
  return {{"alpha0", q.alpha0}, {"alpha", to_json(q.alpha)}, {"H_upper", upper}};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot open '" + path + "' for writing");
  return f;
}

// Options shared by study and approx.
struct SetOptions {
  std::string function = "sum-of-cubes";
  std::size_t dim = 2;
  std::size_t k = 0;
  std::string family = "canonical";
  std::string x0;
  std::string s_text;
  std::string t_text;
  std::string estimator = "nested-set";
  bool symmetrize = false;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--function", function, "registry expression, e.g. product(sum-of-cubes,exp-of-sum)")
        ->capture_default_str();
    app->add_option("--dim", dim, "dimension n")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--k", k, "pivot index of U_k, 0..n")->capture_default_str();
    app->add_option("--family", family, "canonical, random or fixed")
        ->capture_default_str()
        ->check(CLI::IsMember({"canonical", "random", "fixed"}));
    app->add_option("--x0", x0, "point of interest, comma separated (default: function's default)");
    app->add_option("--S", s_text, "fixed family: S with directions as columns, rows split by ';'");
    app->add_option("--T", t_text, "fixed family: T with directions as columns, rows split by ';'");
    app->add_option("--estimator", estimator, "nested-set, product-sc, product-qc, quotient-sc, ...")
        ->capture_default_str();
    app->add_flag("--symmetrize", symmetrize, "return (H + H^T) / 2");
    app->add_option("--seed", seed, "seed for random quadratics and random sets")->capture_default_str();
  }

  dfh::StudyConfig config() const {
    dfh::StudyConfig c;
    c.function = function;
    c.dim = dim;
    c.k = k;
    c.family = family == "canonical" ? dfh::SetFamily::canonical
               : family == "random"  ? dfh::SetFamily::random
                                     : dfh::SetFamily::fixed;
    if (!x0.empty()) c.x0 = dfh::io::parse_vector(x0);
    if (!s_text.empty()) c.S = dfh::io::parse_matrix(s_text);
    if (!t_text.empty()) c.T = dfh::io::parse_matrix(t_text);
    if (c.family == dfh::SetFamily::fixed && (!c.S || !c.T)) {
      throw std::invalid_argument("--family fixed needs --S and --T");
    }
    c.estimator = dfh::parse_estimator(estimator);
    c.symmetrize = symmetrize;
    c.seed = seed;
    return c;
  }
};

int run_study_cmd(const SetOptions& opts, double beta_start, double beta_ratio, std::size_t steps,
                  const std::string& out_path, bool serial) {
  dfh::StudyConfig cfg = opts.config();
  cfg.beta_start = beta_start;
  cfg.beta_ratio = beta_ratio;
  cfg.beta_steps = steps;
  cfg.parallel = !serial;
  const dfh::ConvergenceReport report = dfh::run_study(cfg);

  std::ostream* summary = &std::cerr;
  if (!out_path.empty()) {
    std::ofstream f = open_out(out_path);
    dfh::io::write_report_csv(f, report);
    summary = &std::cout;
  } else {
    dfh::io::write_report_csv(std::cout, report);
  }
  *summary << "function: " << report.function << "\nestimator: " << dfh::estimator_name(report.estimator) << '\n';
  if (report.exact) {
    *summary << "fitted_order: exact\n";
  } else if (report.fitted_order) {
    *summary << "fitted_order: " << *report.fitted_order << "\nkappa: " << *report.kappa << '\n';
  } else {
    *summary << "fitted_order: n/a (" << report.fitted_rows << " rows above the noise floor)\n";
  }
  const bool ok = report.within_bounds();
  *summary << "within_bounds: " << (ok ? "yes" : "no") << '\n';
  return ok ? 0 : kExitFail;
}

int run_verify_cmd() {
  bool all = true;
  for (const auto& c : dfh::verify_examples()) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  return all ? 0 : kExitFail;
}

int run_approx_cmd(const SetOptions& opts, double beta, const std::string& trace_path,
                   const std::string& points_path) {
  const dfh::StudyConfig cfg = opts.config();
  if (!(beta > 0.0)) throw std::invalid_argument("--beta must be positive");
  const auto fn = dfh::make_function(cfg.function, cfg.dim, cfg.seed);
  const dfh::Vector x0 = cfg.x0 ? *cfg.x0 : fn->default_x0;
  if (static_cast<std::size_t>(x0.size()) != cfg.dim) throw std::invalid_argument("x0 has the wrong dimension");
  const dfh::DirectionPair sets = dfh::study_sets(cfg, beta);
  const dfh::PointSet pts = dfh::nshc_points(x0, sets.S, sets.T);

  json out;
  out["function"] = fn->name;
  out["estimator"] = dfh::estimator_name(cfg.estimator);
  out["x0"] = to_json(x0);
  out["beta"] = beta;

  if (cfg.estimator == dfh::Estimator::nested_set) {
    dfh::EvaluationCache cache = dfh::EvaluationCache::for_sets(fn->oracle(), x0, sets.S, sets.T);
    cache.set_tracing(!trace_path.empty());
    const dfh::HessianResult h = dfh::nested_set_hessian(x0, sets.S, sets.T, cache, cfg.symmetrize);
    const dfh::GradientResult g = dfh::simplex_gradient(x0, sets.T, cache);
    const dfh::DerivativeEnvelope env = fn->envelope(x0, sets.S.radius() + sets.T.radius());
    const double bound =
        dfh::error_bound_nsh(dfh::make_bound_inputs(sets.S, sets.T, env.sup_hessian, env.lip_hessian));
    const dfh::Matrix ref = fn->hessian(x0);
    out["hessian"] = to_json(h.hessian);
    out["reference"] = to_json(ref);
    out["error_spec"] = dfh::linalg::spectral_norm(h.hessian - ref);
    out["error_fro"] = dfh::linalg::frobenius_norm(h.hessian - ref);
    out["bound"] = bound;
    out["simplex_gradient"] = to_json(g.gradient);
    out["delta_u"] = h.delta_u;
    out["delta_l"] = h.delta_l;
    out["symmetrized"] = h.symmetrized;
    if (pts.size() == dfh::quadratic_basis_size(cfg.dim) && dfh::is_poised_quadratic(pts)) {
      std::vector<double> values;
      for (const auto& y : pts.points()) values.push_back(cache.evaluate(y));
      out["model"] = model_json(dfh::interpolate_general(pts, values, x0));
    } else {
      out["model"] = nullptr;
    }
    out["evals"] = cache.distinct_count();
    if (!trace_path.empty()) {
      std::ofstream f = open_out(trace_path);
      dfh::write_trace_csv(f, cache.trace());
    }
  } else {
    if (!trace_path.empty()) throw std::invalid_argument("--trace is only available for the nested-set estimator");
    const dfh::EstimateOutcome o =
        dfh::run_estimate(*fn, cfg.estimator, x0, sets.S, sets.T, cfg.symmetrize);
    out["hessian"] = to_json(o.result.hessian);
    out["reference"] = to_json(o.reference);
    out["error_spec"] = dfh::linalg::spectral_norm(o.result.hessian - o.reference);
    out["error_fro"] = dfh::linalg::frobenius_norm(o.result.hessian - o.reference);
    out["bound"] = o.bound;
    out["delta_u"] = o.result.delta_u;
    out["delta_l"] = o.result.delta_l;
    out["symmetrized"] = o.result.symmetrized;
    out["evals"] = o.evals;
  }
  if (!points_path.empty()) {
    std::ofstream f = open_out(points_path);
    dfh::io::write_points_csv(f, pts);
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free Hessian approximation toolkit"};
  app.require_subcommand(1);

  SetOptions study_opts;
  double beta_start = 0.1;
  double beta_ratio = 0.5;
  std::size_t beta_steps = 12;
  std::string out_path;
  bool serial = false;
  CLI::App* study = app.add_subcommand("study", "sweep beta and fit the empirical order of accuracy");
  study_opts.attach(study);
  study->add_option("--beta-start", beta_start, "largest beta")->capture_default_str();
  study->add_option("--beta-ratio", beta_ratio, "geometric ratio in (0, 1)")->capture_default_str();
  study->add_option("--beta-steps", beta_steps, "number of beta values")->capture_default_str();
  study->add_option("--out", out_path, "write the CSV report here instead of stdout");
  study->add_flag("--serial", serial, "evaluate beta rows one at a time");

  CLI::App* verify = app.add_subcommand("verify-examples", "check the worked two-dimensional examples");

  SetOptions approx_opts;
  double beta = 0.1;
  std::string trace_path;
  std::string points_path;
  CLI::App* approx = app.add_subcommand("approx", "one Hessian estimate at a point, as JSON");
  approx_opts.attach(approx);
  approx->add_option("--beta", beta, "set radius parameter")->capture_default_str();
  approx->add_option("--trace", trace_path, "write the evaluation trace CSV here");
  approx->add_option("--points", points_path, "write the evaluation point set CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (study->parsed()) return run_study_cmd(study_opts, beta_start, beta_ratio, beta_steps, out_path, serial);
    if (verify->parsed()) return run_verify_cmd();
    if (approx->parsed()) return run_approx_cmd(approx_opts, beta, trace_path, points_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitConfig;
}
