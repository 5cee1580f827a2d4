// Command-line front end: orchestrates the functional, semigroup, inequality,
// Gamma-calculus and Gaussian-functional layers and emits JSON reports plus
// CSV curves. Exit codes: 0 all statements hold / success, 1 indeterminate
// (divergence flags), 2 violation or invalid input.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "steinlab/functionals.hpp"
#include "steinlab/gamma_calculus.hpp"
#include "steinlab/gauss_functionals.hpp"
#include "steinlab/inequalities.hpp"
#include "steinlab/measures.hpp"
#include "steinlab/mpoly.hpp"
#include "steinlab/ou_semigroup.hpp"
#include "steinlab/report.hpp"
#include "steinlab/rng.hpp"

using nlohmann::json;
using namespace steinlab;

namespace {

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::pair<std::string, std::vector<double>> split_spec(const std::string& spec) {
  const auto pos = spec.find(':');
  if (pos == std::string::npos) return {spec, {}};
  return {spec.substr(0, pos), parse_list(spec.substr(pos + 1))};
}

Target parse_target(const std::string& spec) {
  const auto [name, args] = split_spec(spec);
  auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw std::invalid_argument("target '" + name + "' takes " + std::to_string(k) +
                                  " parameter(s)");
  };
  if (name == "gaussian-scale") {
    want(1);
    return target_gaussian_scale(args[0]);
  }
  if (name == "centered-gamma") {
    want(1);
    return target_centered_gamma(args[0]);
  }
  if (name == "uniform") {
    want(0);
    return target_uniform();
  }
  if (name == "mixture") {
    want(2);
    return target_mixture(args[0], args[1]);
  }
  if (name == "student") {
    want(1);
    return target_student_like(args[0]);
  }
  if (name == "gamma-tilt-quadratic") {
    want(2);
    return gamma_tilt_quadratic(args[0], args[1]);
  }
  if (name == "gamma-tilt-cubic") {
    want(2);
    return gamma_tilt_cubic(args[0], args[1]);
  }
  if (name == "uniform-tilt-quadratic") {
    want(1);
    return uniform_tilt_quadratic(args[0]);
  }
  throw std::invalid_argument(
      "unknown target '" + name +
      "' (expected gaussian-scale:<s2>, centered-gamma:<p>, uniform, "
      "mixture:<n>,<a>, student:<alpha>, gamma-tilt-quadratic:<p>,<eps>, "
      "gamma-tilt-cubic:<p>,<eps>, uniform-tilt-quadratic:<eps>)");
}

Reference parse_reference(const std::string& spec) {
  const auto [name, args] = split_spec(spec);
  if (name == "gaussian") return ref_gaussian(args.empty() ? 1.0 : args[0]);
  if (name == "gamma") {
    if (args.size() != 1) throw std::invalid_argument("reference gamma:<p>");
    return ref_gamma(args[0]);
  }
  if (name == "jacobi") return ref_jacobi();
  if (name == "log-concave") {
    if (args.empty()) throw std::invalid_argument("reference log-concave:<u coeffs>");
    return ref_log_concave(args);
  }
  throw std::invalid_argument("unknown reference '" + name + "'");
}

json num_or_string(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

void emit(const json& config_echo, const json& reports, const std::string& curves_path,
          const std::string& json_path) {
  json out;
  out["tool_version"] = kToolVersion;
  out["config_echo"] = config_echo;
  out["reports"] = reports;
  out["curves_path"] = curves_path.empty() ? json() : json(curves_path);
  const std::string text = out.dump(2) + "\n";
  if (json_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(json_path);
    if (!f) throw std::runtime_error("cannot write " + json_path);
    f << text;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

int verdict(const std::vector<InequalityReport>& reports) {
  bool indet = false;
  for (const auto& r : reports) {
    if (r.indeterminate) {
      indet = true;
    } else if (!r.holds) {
      return 2;
    }
  }
  return indet ? 1 : 0;
}

// Applies config-file values to options the command line left untouched.
struct ConfigLayer {
  json data = json::object();
  std::vector<std::function<void()>> appliers;

  void load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot read config file " + path);
    f >> data;
  }

  template <typename T>
  void bind(CLI::Option* opt, T& var, const std::string& section, const std::string& key) {
    appliers.push_back([this, opt, &var, section, key]() {
      if (opt->count() > 0) return;  // flags override the file
      const json* scope = nullptr;
      if (data.contains(section) && data[section].contains(key))
        scope = &data[section][key];
      else if (data.contains(key))
        scope = &data[key];
      if (scope) var = scope->get<T>();
    });
  }

  void apply() {
    for (auto& f : appliers) f();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy / Fisher-information / Stein-discrepancy workbench for "
               "one-dimensional laws and polynomial Gaussian functionals"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file; command sections override top-level keys, "
                 "command-line flags override both");

  std::optional<std::uint64_t> seed_opt;
  app.add_option("--seed", seed_opt, "Monte Carlo master seed (env STEINLAB_SEED)");
  std::string json_path;
  app.add_option("--json", json_path, "write the JSON report here (default stdout)");
  double abs_tol = -1.0, rel_tol = -1.0;
  app.add_option("--abs-tol", abs_tol, "quadrature absolute tolerance override");
  app.add_option("--rel-tol", rel_tol, "quadrature relative tolerance override");

  ConfigLayer cfg;

  // ---- compute ----
  auto* c_compute = app.add_subcommand("compute", "functionals H, I, S, W_p, TV");
  c_compute->fallthrough();
  std::string co_target, co_ref = "gaussian";
  double co_p = 2.0;
  cfg.bind(c_compute->add_option("--target", co_target, "target spec"), co_target,
           "compute", "target");
  cfg.bind(c_compute->add_option("--ref", co_ref, "reference spec"), co_ref, "compute",
           "ref");
  cfg.bind(c_compute->add_option("--p", co_p, "transport order"), co_p, "compute", "p");

  // ---- verify ----
  auto* c_verify = app.add_subcommand("verify", "verify inequalities on a target");
  c_verify->fallthrough();
  std::string v_kind, v_target;
  double v_t = 1.0, v_p = 1.0, v_cov = 1.0;
  cfg.bind(c_verify->add_option("--kind", v_kind, "inequality kind or 'all'"), v_kind,
           "verify", "kind");
  cfg.bind(c_verify->add_option("--target", v_target, "target spec"), v_target,
           "verify", "target");
  cfg.bind(c_verify->add_option("--t", v_t, "evaluation time for entropy_decay"), v_t,
           "verify", "t");
  cfg.bind(c_verify->add_option("--p", v_p, "order for wp"), v_p, "verify", "p");
  cfg.bind(c_verify->add_option("--cov", v_cov, "reference variance for hsi_cov"),
           v_cov, "verify", "cov");

  // ---- evolve ----
  auto* c_evolve = app.add_subcommand("evolve", "heat-flow decay curves");
  c_evolve->fallthrough();
  std::string e_target, e_times = "0,0.25,0.5,0.75,1,1.5,2,3", e_out = "curves.csv";
  cfg.bind(c_evolve->add_option("--target", e_target, "target spec"), e_target,
           "evolve", "target");
  cfg.bind(c_evolve->add_option("--times", e_times, "comma-separated times"), e_times,
           "evolve", "times");
  cfg.bind(c_evolve->add_option("--out", e_out, "CSV output path"), e_out, "evolve",
           "out");

  // ---- sweep ----
  auto* c_sweep = app.add_subcommand("sweep", "two-scale mixture sweep");
  c_sweep->fallthrough();
  std::string s_ns = "100,1000,10000", s_as, s_out;
  cfg.bind(c_sweep->add_option("--ns", s_ns, "spike frequencies"), s_ns, "sweep", "ns");
  cfg.bind(c_sweep->add_option("--as", s_as, "spike weights (default n^-1/2)"), s_as,
           "sweep", "as");
  cfg.bind(c_sweep->add_option("--out", s_out, "CSV output path"), s_out, "sweep",
           "out");

  // ---- gamma-calc ----
  auto* c_gamma = app.add_subcommand("gamma-calc", "curvature criteria checks");
  c_gamma->fallthrough();
  std::string g_model = "ou", g_check = "criteria";
  double g_rho = kNaN, g_kappa = kNaN, g_sigma = kNaN, g_c = kNaN;
  int g_draws = 1000, g_maxdeg = 4;
  std::uint64_t g_seed = 7u;
  cfg.bind(c_gamma->add_option("--model", g_model,
                               "ou | laguerre:<p> | jacobi | log-concave:<u coeffs>"),
           g_model, "gamma-calc", "model");
  cfg.bind(c_gamma->add_option("--check", g_check, "criteria | conditions"), g_check,
           "gamma-calc", "check");
  cfg.bind(c_gamma->add_option("--rho", g_rho, "curvature constant"), g_rho,
           "gamma-calc", "rho");
  cfg.bind(c_gamma->add_option("--kappa", g_kappa, "third-order constant"), g_kappa,
           "gamma-calc", "kappa");
  cfg.bind(c_gamma->add_option("--sigma", g_sigma, "second-derivative constant"),
           g_sigma, "gamma-calc", "sigma");
  cfg.bind(c_gamma->add_option("--c", g_c, "log-concave convexity constant"), g_c,
           "gamma-calc", "c");
  cfg.bind(c_gamma->add_option("--draws", g_draws, "random polynomial draws"), g_draws,
           "gamma-calc", "draws");
  cfg.bind(c_gamma->add_option("--max-degree", g_maxdeg, "draw degree cap"), g_maxdeg,
           "gamma-calc", "max-degree");
  cfg.bind(c_gamma->add_option("--draw-seed", g_seed, "sampler seed"), g_seed,
           "gamma-calc", "draw-seed");

  // ---- functional ----
  auto* c_func = app.add_subcommand("functional", "polynomial Gaussian functionals");
  c_func->fallthrough();
  std::vector<std::string> f_exprs;
  std::string f_op = "eigen-check", f_lambda;
  int f_dim = 1, f_k = 2;
  double f_alpha = 1.0, f_p = 1.0;
  bool f_estimate_s = false;
  long f_samples = 1000000;
  cfg.bind(c_func->add_option("--expr", f_exprs, "polynomial, e.g. '0.5*x1^2 - 0.5' "
                              "(repeat for a vector)"),
           f_exprs, "functional", "expr");
  cfg.bind(c_func->add_option("--dim", f_dim, "ambient dimension"), f_dim, "functional",
           "dim");
  cfg.bind(c_func->add_option("--op", f_op,
                              "eigen-check | stein-bound | fourth-moment | u-bound | "
                              "entropy-normal | entropy-gamma"),
           f_op, "functional", "op");
  cfg.bind(c_func->add_option("--lambda", f_lambda, "eigenvalues for stein-bound"),
           f_lambda, "functional", "lambda");
  cfg.bind(c_func->add_option("--k", f_k, "chaos order for fourth-moment"), f_k,
           "functional", "k");
  cfg.bind(c_func->add_option("--alpha", f_alpha, "determinant moment order"), f_alpha,
           "functional", "alpha");
  cfg.bind(c_func->add_option("--p", f_p, "gamma reference shape"), f_p, "functional",
           "p");
  cfg.bind(c_func->add_flag("--estimate-S", f_estimate_s,
                            "estimate the discrepancy of the smoothed law of F"),
           f_estimate_s, "functional", "estimate-S");
  cfg.bind(c_func->add_option("--samples", f_samples, "Monte Carlo samples"), f_samples,
           "functional", "samples");

  // ---- clt ----
  auto* c_clt = app.add_subcommand("clt", "entropic CLT rate for weighted sums");
  c_clt->fallthrough();
  std::string t_target, t_weights, t_hist;
  int t_n = 0;
  double t_poincare = 0.0;
  long t_samples = 200000;
  cfg.bind(c_clt->add_option("--target", t_target, "base target spec"), t_target, "clt",
           "target");
  cfg.bind(c_clt->add_option("--n", t_n, "equal weights 1/sqrt(n)"), t_n, "clt", "n");
  cfg.bind(c_clt->add_option("--weights", t_weights, "explicit weights"), t_weights,
           "clt", "weights");
  cfg.bind(c_clt->add_option("--poincare", t_poincare, "Poincare constant (optional)"),
           t_poincare, "clt", "poincare");
  cfg.bind(c_clt->add_option("--hist", t_hist, "write a sample histogram CSV here"),
           t_hist, "clt", "hist");
  cfg.bind(c_clt->add_option("--samples", t_samples, "histogram samples"), t_samples,
           "clt", "samples");

  // ---- concentration ----
  auto* c_conc = app.add_subcommand("concentration", "moment growth and tail fits");
  c_conc->fallthrough();
  std::string n_law = "gaussian", n_ps = "2,4,8,16", n_out;
  double n_shape = 1.0;
  int n_n = 100;
  long n_samples = 200000;
  bool n_tail = false;
  cfg.bind(c_conc->add_option("--law", n_law, "gaussian | gamma | gamma_sum"), n_law,
           "concentration", "law");
  cfg.bind(c_conc->add_option("--shape", n_shape, "gamma shape"), n_shape,
           "concentration", "shape");
  cfg.bind(c_conc->add_option("--n", n_n, "sum length"), n_n, "concentration", "n");
  cfg.bind(c_conc->add_option("--ps", n_ps, "moment orders"), n_ps, "concentration",
           "ps");
  cfg.bind(c_conc->add_option("--samples", n_samples, "Monte Carlo samples"), n_samples,
           "concentration", "samples");
  cfg.bind(c_conc->add_flag("--tail", n_tail, "also fit the sub-Gaussian tail window"),
           n_tail, "concentration", "tail");
  cfg.bind(c_conc->add_option("--out", n_out, "CSV output path"), n_out,
           "concentration", "out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (!config_path.empty()) cfg.load(config_path);
    cfg.apply();

    const std::uint64_t seed = seed_opt ? *seed_opt : resolve_seed(std::nullopt);
    QuadOptions quad = default_quad_options();
    if (abs_tol > 0) quad.abs_tol = abs_tol;
    if (rel_tol > 0) quad.rel_tol = rel_tol;

    json echo;
    echo["seed"] = seed;
    echo["abs_tol"] = quad.abs_tol;
    echo["rel_tol"] = quad.rel_tol;

    if (c_compute->parsed()) {
      echo["command"] = "compute";
      echo["target"] = co_target;
      echo["ref"] = co_ref;
      echo["p"] = co_p;
      const Target t = parse_target(co_target);
      const Reference ref = parse_reference(co_ref);
      json reports = json::array();
      bool indet = false;
      for (const FunctionalValue& v :
           {relative_entropy(t, ref, quad), fisher_information(t, ref, quad),
            stein_discrepancy(t, ref, 2.0, quad), wasserstein(t, ref, co_p, quad),
            total_variation(t, ref, quad)}) {
        reports.push_back(to_json(v));
        if (v.diverged && std::isnan(v.value)) indet = true;
      }
      emit(echo, reports, "", json_path);
      return indet ? 1 : 0;
    }

    if (c_verify->parsed()) {
      echo["command"] = "verify";
      echo["kind"] = v_kind;
      echo["target"] = v_target;
      echo["t"] = v_t;
      echo["p"] = v_p;
      echo["cov"] = v_cov;
      const auto& kinds = inequality_kinds();
      if (v_kind != "all" &&
          std::find(kinds.begin(), kinds.end(), v_kind) == kinds.end()) {
        std::cerr << app.help() << "\n";
        std::cerr << "error: unknown inequality kind '" << v_kind << "' (use 'all'";
        for (const auto& k : kinds) std::cerr << ", '" << k << "'";
        std::cerr << ")\n";
        return 2;
      }
      const Target t = parse_target(v_target);
      VerifyOptions vo;
      vo.t = v_t;
      vo.p = v_p;
      vo.cov = v_cov;
      vo.quad = quad;
      std::vector<InequalityReport> rs;
      if (v_kind == "all")
        rs = verify_all(t, vo);
      else
        rs.push_back(verify(v_kind, t, vo));
      json reports = json::array();
      for (const auto& r : rs) reports.push_back(to_json(r));
      emit(echo, reports, "", json_path);
      return verdict(rs);
    }

    if (c_evolve->parsed()) {
      echo["command"] = "evolve";
      echo["target"] = e_target;
      echo["times"] = e_times;
      echo["out"] = e_out;
      const Target t = parse_target(e_target);
      const std::vector<double> times = parse_list(e_times);
      if (times.empty()) throw std::invalid_argument("empty time grid");
      const auto rows = decay_curves(t, times, quad);
      write_file(e_out, decay_csv(rows));
      json reports = json::array();
      bool indet = false;
      for (const auto& r : rows) {
        json jr;
        jr["t"] = r.t;
        jr["H"] = num_or_string(r.H);
        jr["I"] = num_or_string(r.I);
        jr["S"] = num_or_string(r.S);
        reports.push_back(jr);
        if (std::isnan(r.H) || std::isnan(r.I) || std::isnan(r.S)) indet = true;
      }
      emit(echo, reports, e_out, json_path);
      return indet ? 1 : 0;
    }

    if (c_sweep->parsed()) {
      echo["command"] = "sweep";
      echo["ns"] = s_ns;
      echo["as"] = s_as;
      const auto rows = counterexample_sweep(parse_list(s_ns), parse_list(s_as), quad);
      if (!s_out.empty()) write_file(s_out, sweep_csv(rows));
      json reports = json::array();
      int code = 0;
      for (const auto& r : rows) {
        json jr;
        jr["n"] = r.n;
        jr["a"] = r.a;
        jr["H"] = num_or_string(r.H);
        jr["hsi_rhs"] = num_or_string(r.hsi_rhs);
        jr["hwi_rhs"] = num_or_string(r.hwi_rhs);
        jr["hsi_holds"] = r.hsi_holds;
        jr["hwi_holds"] = r.hwi_holds;
        jr["hsi_budget_ok"] = r.hsi_budget_ok;
        reports.push_back(jr);
        if (!r.hsi_holds || !r.hwi_holds) code = 2;
      }
      emit(echo, reports, s_out, json_path);
      return code;
    }

    if (c_gamma->parsed()) {
      echo["command"] = "gamma-calc";
      echo["model"] = g_model;
      echo["check"] = g_check;
      const auto [mname, margs] = split_spec(g_model);
      Diffusion1D model;
      double def_rho = 1.0, def_kappa = 1.0, def_sigma = 1.0;
      if (mname == "ou") {
        model = model_ou();
      } else if (mname == "laguerre") {
        if (margs.size() != 1) throw std::invalid_argument("laguerre:<p>");
        model = model_laguerre(Rat(margs[0]));
        def_rho = def_kappa = def_sigma = 0.5;
      } else if (mname == "jacobi") {
        model = model_jacobi();
        def_sigma = 0.5;
      } else if (mname == "log-concave") {
        if (margs.empty()) throw std::invalid_argument("log-concave:<u coeffs>");
        model = model_log_concave(RatPoly::from_doubles(margs));
        if (std::isnan(g_c)) throw std::invalid_argument("log-concave needs --c");
        def_rho = g_c;
        def_kappa = 3.0 * g_c;
        def_sigma = 1.0;
      } else {
        throw std::invalid_argument("unknown model '" + mname + "'");
      }
      const double rho = std::isnan(g_rho) ? def_rho : g_rho;
      const double kap = std::isnan(g_kappa) ? def_kappa : g_kappa;
      const double sig = std::isnan(g_sigma) ? def_sigma : g_sigma;
      echo["rho"] = rho;
      echo["kappa"] = kap;
      echo["sigma"] = sig;
      json reports = json::array();
      int code = 0;
      if (g_check == "criteria") {
        const CriteriaReport r =
            check_criteria(model, rho, kap, sig, g_draws, g_maxdeg, g_seed);
        for (const auto* one : {&r.c1, &r.c2, &r.c3}) {
          json jr;
          jr["criterion"] = one->criterion;
          jr["min_slack"] = num_or_string(one->min_slack);
          jr["argmin_x"] = one->argmin_x;
          jr["argmin_f"] = one->argmin_f;
          reports.push_back(jr);
        }
        json sum;
        sum["pass"] = r.pass;
        reports.push_back(sum);
        code = r.pass ? 0 : 2;
      } else if (g_check == "conditions") {
        if (mname != "log-concave")
          throw std::invalid_argument("conditions apply to log-concave models");
        const auto [uname, ucoeffs] = split_spec(g_model);
        const LogConcaveReport r =
            log_concave_conditions(RatPoly::from_doubles(ucoeffs), g_c);
        json jr;
        jr["pass"] = r.pass;
        jr["min_slack_convexity"] = num_or_string(r.min_slack_convexity);
        jr["worst_x_convexity"] = r.worst_x_convexity;
        jr["min_slack_a"] = num_or_string(r.min_slack_a);
        jr["worst_x_a"] = r.worst_x_a;
        jr["min_slack_b"] = num_or_string(r.min_slack_b);
        jr["worst_x_b"] = r.worst_x_b;
        reports.push_back(jr);
        code = r.pass ? 0 : 2;
      } else {
        throw std::invalid_argument("unknown check '" + g_check + "'");
      }
      emit(echo, reports, "", json_path);
      return code;
    }

    if (c_func->parsed()) {
      echo["command"] = "functional";
      echo["op"] = f_op;
      echo["dim"] = f_dim;
      echo["expr"] = f_exprs;
      echo["samples"] = f_samples;
      if (f_exprs.empty()) throw std::invalid_argument("--expr is required");
      std::vector<MPoly> F;
      for (const auto& e : f_exprs) F.push_back(parse_mpoly(e, f_dim));
      json reports = json::array();
      int code = 0;
      if (f_op == "eigen-check") {
        for (std::size_t i = 0; i < F.size(); ++i) {
          const auto lam = eigen_check(F[i]);
          json jr;
          jr["component"] = i + 1;
          jr["eigenfunction"] = lam.has_value();
          if (lam) jr["lambda"] = *lam;
          reports.push_back(jr);
        }
      } else if (f_op == "stein-bound") {
        std::vector<double> lambda = parse_list(f_lambda);
        if (lambda.empty())
          for (const auto& f : F) {
            const auto lam = eigen_check(f);
            if (!lam) throw std::invalid_argument("component is not an eigenfunction");
            lambda.push_back(*lam);
          }
        reports.push_back(to_json(eigen_stein_bound(F, lambda, f_samples, seed)));
      } else if (f_op == "fourth-moment") {
        const FourthMomentResult r = fourth_moment_bound(F.at(0), f_k, f_samples, seed);
        json jr;
        jr["V2"] = num_or_string(r.V2);
        jr["bound"] = num_or_string(r.bound);
        jr["EF2"] = num_or_string(r.EF2);
        jr["EF4"] = num_or_string(r.EF4);
        jr["exact"] = r.exact;
        jr["se"] = r.se;
        reports.push_back(jr);
      } else if (f_op == "u-bound") {
        const UBoundResult r = fisher_U_bound(F, f_samples, seed);
        json jr;
        jr["estimate"] = to_json(r.estimate);
        jr["divergence_flag"] = r.divergence_flag;
        jr["growth_events"] = r.growth_events;
        jr["max_share"] = r.max_share;
        json sched = json::array();
        for (const auto& [n, m] : r.schedule) sched.push_back({{"n", n}, {"mean", m}});
        jr["schedule"] = sched;
        reports.push_back(jr);
        if (r.divergence_flag) code = 1;
      } else if (f_op == "entropy-normal") {
        const NormalEntropyBound r = entropy_bound_normal(F, f_alpha, f_samples, seed);
        json jr;
        jr["V2"] = num_or_string(r.V2);
        jr["A"] = to_json(r.A);
        jr["B"] = to_json(r.B);
        jr["kappa"] = r.kappa;
        jr["bound"] = num_or_string(r.bound);
        jr["substitution_monotone"] = r.substitution_monotone;
        jr["note"] = r.note;
        reports.push_back(jr);
        if (r.B.flagged) code = 1;
      } else if (f_op == "entropy-gamma") {
        const GammaEntropyBound r =
            entropy_bound_gamma(F.at(0), f_p, f_alpha, f_samples, seed, f_estimate_s);
        json jr;
        jr["A"] = to_json(r.A);
        jr["B"] = to_json(r.B);
        jr["kappa"] = r.kappa;
        jr["rejected"] = r.rejected;
        if (r.S2) jr["S2"] = num_or_string(*r.S2);
        if (r.bound) jr["bound"] = num_or_string(*r.bound);
        jr["note"] = r.note;
        reports.push_back(jr);
        if (r.B.flagged) code = 1;
      } else {
        throw std::invalid_argument("unknown op '" + f_op + "'");
      }
      emit(echo, reports, "", json_path);
      return code;
    }

    if (c_clt->parsed()) {
      echo["command"] = "clt";
      echo["target"] = t_target;
      const Target t = parse_target(t_target);
      std::vector<double> weights = parse_list(t_weights);
      if (weights.empty()) {
        if (t_n < 1) throw std::invalid_argument("give --n or --weights");
        weights.assign(static_cast<std::size_t>(t_n),
                       1.0 / std::sqrt(static_cast<double>(t_n)));
      }
      echo["n"] = static_cast<int>(weights.size());
      std::optional<double> pc;
      if (t_poincare > 0.0) pc = t_poincare;
      const CltResult r = sum_discrepancy_clt(t, weights, pc, quad);
      json jr;
      jr["alpha_a"] = r.alpha_a;
      jr["S2_base"] = num_or_string(r.S2_base);
      jr["I_base"] = num_or_string(r.I_base);
      jr["S2_bound"] = num_or_string(r.S2_bound);
      jr["I_bound"] = num_or_string(r.I_bound);
      jr["entropy_bound"] = num_or_string(r.entropy_bound);
      if (r.H_base) jr["H_base"] = num_or_string(*r.H_base);
      if (r.poincare_bound) jr["poincare_bound"] = num_or_string(*r.poincare_bound);
      json reports = json::array({jr});
      std::string curves;
      if (!t_hist.empty()) {
        write_file(t_hist, histogram_csv(clt_histogram(t, weights, t_samples, seed)));
        curves = t_hist;
      }
      emit(echo, reports, curves, json_path);
      return 0;
    }

    if (c_conc->parsed()) {
      echo["command"] = "concentration";
      echo["law"] = n_law;
      echo["shape"] = n_shape;
      echo["n"] = n_n;
      echo["ps"] = n_ps;
      echo["samples"] = static_cast<long long>(n_samples);
      const ConcentrationResult r =
          concentration_moments(n_law, n_shape, n_n, parse_list(n_ps), n_samples, seed);
      if (!n_out.empty()) write_file(n_out, concentration_csv(r));
      json reports = json::array();
      for (const auto& row : r.rows) {
        json jr;
        jr["p"] = row.p;
        jr["lhs"] = num_or_string(row.lhs);
        jr["Sp"] = num_or_string(row.Sp);
        jr["tau_term"] = num_or_string(row.tau_term);
        jr["rhs_unit"] = num_or_string(row.rhs_unit);
        jr["c_required"] = num_or_string(row.c_required);
        jr["rosenthal_Sp"] = num_or_string(row.rosenthal_Sp);
        reports.push_back(jr);
      }
      json sum;
      sum["c_min"] = num_or_string(r.c_min);
      reports.push_back(sum);
      if (n_tail) {
        const TailExponent te = tail_exponent_gamma_sum(n_shape, n_n, n_samples, seed);
        json jt;
        jt["kappa_hat"] = num_or_string(te.kappa_hat);
        jt["r"] = te.r;
        jt["survival"] = te.survival;
        reports.push_back(jt);
      }
      emit(echo, reports, n_out, json_path);
      return 0;
    }

    std::cerr << app.help() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
