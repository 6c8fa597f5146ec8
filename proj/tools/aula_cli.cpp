/*
 Copyright 2026 Aula contributors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Command-line front end: solve, bench-lp, bench-traj, check-grad, oracle.
//
// Exit codes: 0 success/converged, 1 bad input (parse errors, bad flags),
// 2 failed (solver failure, gradient check failure, every benchmark solve
// failed, oracle without optimum), 3 iteration limit.

#include "aula/benchmark.hpp"
#include "aula/lp_oracle.hpp"
#include "aula/problem_io.hpp"
#include "aula/solvers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using aula::VectorXd;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitFailed = 2;
constexpr int kExitMaxIter = 3;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt_vector(const VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt(v[i]);
  }
  return out + "]";
}

json vector_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Solver flags, kebab-case mirrors of SolverOptions. Only flags that were
// given on the command line are turned into overrides.
class SolverFlags {
 public:
  void attach(CLI::App* app) {
    const aula::SolverOptions d;
    add_double(app, "--mu0", "mu0", d.mu0, "Initial inequality penalty");
    add_double(app, "--nu0", "nu0", d.nu0, "Initial equality penalty");
    add_double(app, "--mu-growth", "mu_growth", d.effective_mu_growth(),
               "Penalty growth per outer iteration (default 1, or 2 for sqr_penalty)");
    add_double(app, "--barrier-mu0", "barrier_mu0", d.barrier_mu0, "Initial barrier weight");
    add_double(app, "--barrier-shrink", "barrier_shrink", d.barrier_shrink,
               "Barrier weight factor per outer iteration");
    add_double(app, "--outer-tol", "outer_tol", d.outer_tol, "KKT tolerance for convergence");
    add_double(app, "--delta-double", "delta_double", d.delta_double,
               "Any-time Newton tolerance growth per step");
    add_int(app, "--max-outer", "max_outer", d.max_outer, "Maximum outer iterations");
    add_int(app, "--anytime-steps", "anytime_steps_per_update", d.anytime_steps_per_update,
            "Accepted Newton steps between any-time updates (0: until converged)");
    add_string(app, "--reset-delta", "reset_delta", "true",
               "Reset the Newton tolerance after each any-time update (true|false)");
    add_string(app, "--hessian-mode", "hessian_mode", "gauss_newton", "gauss_newton|full");
    add_string(app, "--row-selection", "row_selection", "mask", "mask|positive_multipliers");

    add_double(app, "--alpha0", "newton.alpha0", d.newton.alpha0, "Initial step size");
    add_double(app, "--beta0", "newton.beta0", d.newton.beta0, "Initial damping");
    add_double(app, "--alpha-plus", "newton.alpha_plus", d.newton.alpha_plus,
               "Step size factor after acceptance");
    add_double(app, "--alpha-minus", "newton.alpha_minus", d.newton.alpha_minus,
               "Step size factor after rejection");
    add_double(app, "--beta-plus", "newton.beta_plus", d.newton.beta_plus,
               "Damping factor after rejection");
    add_double(app, "--beta-minus", "newton.beta_minus", d.newton.beta_minus,
               "Damping factor after acceptance");
    add_double(app, "--rho", "newton.rho", d.newton.rho, "Sufficient decrease constant");
    add_double(app, "--delta", "newton.delta", d.newton.delta, "Newton step tolerance");
    add_int(app, "--max-evals", "newton.max_evals", static_cast<int>(d.newton.max_evals),
            "Evaluation budget per Newton run");
    add_double(app, "--failure-ratio", "newton.failure_ratio", d.newton.failure_ratio,
               "Line-search failure threshold relative to the tolerance");
  }

  json overrides() const {
    json out = json::object();
    for (const auto& f : flags_) {
      if (f.option->count() == 0) continue;
      json value;
      if (f.kind == Kind::real) {
        value = doubles_[f.slot];
      } else if (f.kind == Kind::integer) {
        value = ints_[f.slot];
      } else if (f.key == "reset_delta") {
        const std::string& s = strings_[f.slot];
        if (s != "true" && s != "false") throw std::invalid_argument("--reset-delta takes true or false");
        value = s == "true";
      } else {
        value = strings_[f.slot];
      }
      const auto dot = f.key.find('.');
      if (dot == std::string::npos) {
        out[f.key] = value;
      } else {
        out[f.key.substr(0, dot)][f.key.substr(dot + 1)] = value;
      }
    }
    return out;
  }

 private:
  enum class Kind { real, integer, text };
  struct Flag {
    CLI::Option* option;
    std::string key;
    Kind kind;
    size_t slot;
  };

  void add_double(CLI::App* app, const std::string& name, const std::string& key, double def,
                  const std::string& help) {
    doubles_.push_back(def);
    flags_.push_back({app->add_option(name, doubles_.back(), help)->capture_default_str(), key,
                      Kind::real, doubles_.size() - 1});
  }
  void add_int(CLI::App* app, const std::string& name, const std::string& key, int def,
               const std::string& help) {
    ints_.push_back(def);
    flags_.push_back({app->add_option(name, ints_.back(), help)->capture_default_str(), key,
                      Kind::integer, ints_.size() - 1});
  }
  void add_string(CLI::App* app, const std::string& name, const std::string& key,
                  const std::string& def, const std::string& help) {
    strings_.push_back(def);
    flags_.push_back({app->add_option(name, strings_.back(), help)->capture_default_str(), key,
                      Kind::text, strings_.size() - 1});
  }

  // Deques keep the bound addresses stable as flags are added.
  std::deque<double> doubles_;
  std::deque<int> ints_;
  std::deque<std::string> strings_;
  std::vector<Flag> flags_;
};

// f = 1/2 |x|^2 with a gradient that is off by a factor 1.5. Used to check
// that check-grad reports failures.
aula::LoadedProblem corrupted_gradient_problem(const json& params) {
  const int n = params.value("n", 3);
  if (n < 1) throw std::invalid_argument("corrupted_gradient needs n >= 1");
  aula::Evaluator fn = [n](const VectorXd& x, aula::ProblemEval& out) {
    out.f = 0.5 * x.squaredNorm();
    out.grad_f = 1.5 * x;
    out.hess_f = aula::MatrixXd::Identity(n, n);
    out.g.resize(0);
    out.jac_g.resize(0, n);
    out.h.resize(0);
    out.jac_h.resize(0, n);
  };
  return {aula::ConstrainedProblem(n, 0, 0, std::move(fn)), VectorXd::Ones(n),
          "corrupted_gradient"};
}

aula::ProblemRegistry make_registry() {
  aula::ProblemRegistry registry;
  aula::register_builtin_problems(registry);
  registry.add("corrupted_gradient", corrupted_gradient_problem);
  return registry;
}

aula::LoadedProblem load(const std::string& path) {
  return aula::load_problem_file(path, make_registry());
}

int report_parse_error(const aula::ProblemParseError& err, const std::string& path) {
  std::cerr << "error: " << path << ": " << err.what() << "\n";
  return kExitInput;
}

VectorXd parse_point(const std::vector<double>& values, int n) {
  if (static_cast<int>(values.size()) != n) {
    throw std::invalid_argument("point has " + std::to_string(values.size()) +
                                " entries, problem has " + std::to_string(n) + " variables");
  }
  return Eigen::Map<const VectorXd>(values.data(), n);
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string file;
  std::string method = "aula";
  std::vector<double> x0;
  std::string trace_path;
  bool json_output = false;
};

int cmd_solve(const SolveArgs& args, const SolverFlags& flags, int verbosity) {
  aula::LoadedProblem loaded = load(args.file);
  aula::SolverOptions opts;
  opts.method = aula::parse_method(args.method);
  aula::apply_solver_overrides(flags.overrides(), opts);

  const int n = loaded.problem.dim_x();
  VectorXd x0 = loaded.x0.value_or(VectorXd::Zero(n));
  if (!args.x0.empty()) x0 = parse_point(args.x0, n);
  if (verbosity > 0) {
    std::cerr << "solving '" << args.file << "' (n=" << n << ", m=" << loaded.problem.dim_g()
              << ", l=" << loaded.problem.dim_h() << ") with " << args.method << "\n";
  }

  const aula::Solution sol = aula::solve(loaded.problem, x0, opts);

  if (!args.trace_path.empty()) {
    std::ofstream out(args.trace_path);
    if (!out) throw std::invalid_argument("cannot write trace file '" + args.trace_path + "'");
    sol.trace.write_csv(out);
  }

  if (args.json_output) {
    json doc;
    doc["status"] = aula::to_string(sol.status);
    doc["failure"] = aula::to_string(sol.failure);
    doc["method"] = aula::to_string(opts.method);
    doc["x_final"] = vector_json(sol.x_final);
    doc["f_final"] = sol.f_final;
    doc["lambda"] = vector_json(sol.dual_final.lambda());
    doc["kappa"] = vector_json(sol.dual_final.kappa());
    doc["kkt"] = {{"stationarity", sol.kkt.stationarity},
                  {"primal_ineq", sol.kkt.primal_ineq},
                  {"primal_eq", sol.kkt.primal_eq},
                  {"complementarity", sol.kkt.complementarity}};
    doc["violation"] = sol.violation;
    doc["f_evals"] = sol.f_evals;
    doc["dual_updates"] = sol.dual_updates;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "status:          " << aula::to_string(sol.status) << "\n"
              << "method:          " << aula::to_string(opts.method) << "\n"
              << "x_final:         " << fmt_vector(sol.x_final) << "\n"
              << "f_final:         " << fmt(sol.f_final) << "\n"
              << "lambda:          " << fmt_vector(sol.dual_final.lambda()) << "\n"
              << "kappa:           " << fmt_vector(sol.dual_final.kappa()) << "\n"
              << "stationarity:    " << fmt(sol.kkt.stationarity) << "\n"
              << "primal_ineq:     " << fmt(sol.kkt.primal_ineq) << "\n"
              << "primal_eq:       " << fmt(sol.kkt.primal_eq) << "\n"
              << "complementarity: " << fmt(sol.kkt.complementarity) << "\n"
              << "violation:       " << fmt(sol.violation) << "\n"
              << "f_evals:         " << sol.f_evals << "\n"
              << "dual_updates:    " << sol.dual_updates << "\n";
  }

  switch (sol.status) {
    case aula::SolveStatus::converged:
      return kExitOk;
    case aula::SolveStatus::max_iter:
      std::cerr << "warning: iteration limit reached before convergence\n";
      return kExitMaxIter;
    case aula::SolveStatus::failed:
      break;
  }
  if (sol.failure == aula::FailureReason::infeasible_start) {
    std::cerr << "error: infeasible start: some inequality is not strictly satisfied at x0\n";
  } else {
    std::cerr << "error: solver failed (" << aula::to_string(sol.failure) << ")\n";
  }
  return kExitFailed;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string config_path;
  std::string output;
  std::vector<std::string> methods;
  std::vector<int> n_list;
  double m_rule = 3.0;
  int repetitions = 0;
  std::uint64_t seed = 1;
  std::string offset_mode = "negate_abs";
  int T = 40;
  int d = 2;
  int min_obstacles = 1;
  int max_obstacles = 3;
  int jobs = 1;
  CLI::App* app = nullptr;
};

bool given(const CLI::App* app, const std::string& name) { return app->count(name) > 0; }

int cmd_bench(const BenchArgs& args, const SolverFlags& flags, bool trajectories, int verbosity) {
  aula::BenchmarkConfig config;
  if (!args.config_path.empty()) {
    config = aula::load_benchmark_config(args.config_path);
  }
  // Each subcommand runs only its own family, with defaults when the config lacks it.
  if (trajectories) {
    if (!config.toy_traj) config.toy_traj = aula::ToyTrajectoryFamily{};
    config.random_lp.reset();
  } else {
    if (!config.random_lp) config.random_lp = aula::RandomLpFamily{};
    config.toy_traj.reset();
  }

  const CLI::App* app = args.app;
  if (!args.methods.empty()) {
    config.methods.clear();
    for (const auto& m : args.methods) config.methods.push_back(aula::parse_method(m));
  }
  if (given(app, "--jobs")) config.jobs = args.jobs;
  if (trajectories) {
    auto& fam = *config.toy_traj;
    if (given(app, "--repetitions")) fam.repetitions = args.repetitions;
    if (given(app, "--seed")) fam.base_seed = args.seed;
    if (given(app, "--T")) fam.T = args.T;
    if (given(app, "--d")) fam.d = args.d;
    if (given(app, "--min-obstacles")) fam.min_obstacles = args.min_obstacles;
    if (given(app, "--max-obstacles")) fam.max_obstacles = args.max_obstacles;
  } else {
    auto& fam = *config.random_lp;
    if (given(app, "--n-list")) fam.n_list = args.n_list;
    if (given(app, "--m-rule")) fam.m_rule = args.m_rule;
    if (given(app, "--repetitions")) fam.repetitions = args.repetitions;
    if (given(app, "--seed")) fam.base_seed = args.seed;
    if (given(app, "--offset-mode")) fam.offset_mode = aula::parse_offset_mode(args.offset_mode);
  }

  const json overrides = flags.overrides();
  aula::apply_solver_overrides(overrides, config.solver);
  if (config.random_lp) config.random_lp->solver_overrides.update(overrides);
  if (config.toy_traj) config.toy_traj->solver_overrides.update(overrides);

  if (verbosity > 0) {
    std::cerr << "running " << (trajectories ? "toy_traj" : "random_lp") << " benchmark with "
              << config.methods.size() << " method(s), " << config.jobs << " job(s)\n";
  }
  const aula::BenchmarkTable table = aula::run_benchmark(config);

  if (args.output.empty()) {
    aula::write_benchmark_csv(std::cout, table);
    aula::write_benchmark_summary(std::cerr, table);
  } else {
    std::ofstream out(args.output);
    if (!out) throw std::invalid_argument("cannot write '" + args.output + "'");
    aula::write_benchmark_csv(out, table);
    aula::write_benchmark_summary(std::cout, table);
  }

  bool any_ok = table.rows.empty();
  for (const auto& row : table.rows) any_ok = any_ok || row.status != aula::SolveStatus::failed;
  if (!any_ok) {
    std::cerr << "error: every solve failed\n";
    return kExitFailed;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- check-grad

struct CheckGradArgs {
  std::string file;
  std::vector<double> point;
  bool random_point = false;
  std::uint64_t seed = 1;
  double eps = 1e-6;
  double tol = 1e-4;
};

int cmd_check_grad(const CheckGradArgs& args) {
  aula::LoadedProblem loaded = load(args.file);
  const int n = loaded.problem.dim_x();
  VectorXd x;
  if (!args.point.empty()) {
    x = parse_point(args.point, n);
  } else if (args.random_point) {
    aula::GaussianSampler rng(args.seed);
    x.resize(n);
    const VectorXd base = loaded.x0.value_or(VectorXd::Zero(n));
    for (int i = 0; i < n; ++i) x[i] = base[i] + rng.normal();
  } else {
    x = loaded.x0.value_or(VectorXd::Zero(n));
  }

  const aula::GradientCheckReport rep = aula::check_gradients_fd(loaded.problem, x, args.eps);
  std::cout << "grad_f: " << fmt(rep.grad_f) << "\n"
            << "jac_g:  " << fmt(rep.jac_g) << "\n"
            << "jac_h:  " << fmt(rep.jac_h) << "\n"
            << "hess_f: " << fmt(rep.hess_f) << "\n"
            << "hess_g: " << fmt(rep.hess_g) << "\n"
            << "hess_h: " << fmt(rep.hess_h) << "\n"
            << "max:    " << fmt(rep.max_error()) << "\n";
  if (rep.max_error() > args.tol) {
    std::cout << "FAIL\n";
    std::cerr << "error: derivative mismatch " << fmt(rep.max_error()) << " exceeds "
              << fmt(args.tol) << "\n";
    return kExitFailed;
  }
  std::cout << "PASS\n";
  return kExitOk;
}

// ---------------------------------------------------------------- oracle

int cmd_oracle(const std::string& file) {
  aula::LoadedProblem loaded = load(file);
  const aula::LpOracleResult res = aula::lp_oracle(loaded.problem);
  std::cout << "status:  " << aula::to_string(res.status) << "\n";
  if (res.status == aula::OracleStatus::optimal) {
    std::cout << "x_star:  " << fmt_vector(res.x_star) << "\n"
              << "f_star:  " << fmt(res.optimal_value) << "\n"
              << "lambda:  " << fmt_vector(res.lambda_star) << "\n"
              << "kappa:   " << fmt_vector(res.kappa_star) << "\n";
    return kExitOk;
  }
  if (res.status == aula::OracleStatus::unbounded) {
    std::cout << "ray:     " << fmt_vector(res.ray) << "\n";
  }
  return kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented Lagrangian solvers for constrained nonlinear programs"};
  app.require_subcommand(1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Progress messages on stderr (repeatable)");

  SolveArgs solve_args;
  SolverFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "Solve a problem file");
  solve->add_option("file", solve_args.file, "Problem file (JSON)")->required();
  solve->add_option("-m,--method", solve_args.method, "aula|any_aula|log_barrier|sqr_penalty")
      ->capture_default_str();
  solve->add_option("--x0", solve_args.x0, "Start point (overrides the file)")->delimiter(',');
  solve->add_option("--trace", solve_args.trace_path, "Write the solver trace as CSV");
  solve->add_flag("--json", solve_args.json_output, "Print the report as JSON");
  solve_flags.attach(solve);

  auto add_bench = [&](const std::string& name, const std::string& help, BenchArgs& args,
                       SolverFlags& flags, bool trajectories) {
    CLI::App* sub = app.add_subcommand(name, help);
    args.app = sub;
    sub->add_option("-c,--config", args.config_path, "Benchmark config (JSON)");
    sub->add_option("-o,--output", args.output, "CSV output path (stdout when omitted)");
    sub->add_option("--methods", args.methods, "Methods to run")->delimiter(',');
    sub->add_option("--repetitions", args.repetitions, "Instances per size");
    sub->add_option("--seed", args.seed, "Base seed");
    sub->add_option("-j,--jobs", args.jobs, "Parallel solves")->capture_default_str();
    if (trajectories) {
      sub->add_option("--T", args.T, "Time slices")->capture_default_str();
      sub->add_option("--d", args.d, "Configuration dimension")->capture_default_str();
      sub->add_option("--min-obstacles", args.min_obstacles)->capture_default_str();
      sub->add_option("--max-obstacles", args.max_obstacles)->capture_default_str();
    } else {
      sub->add_option("--n-list", args.n_list, "Problem sizes")->delimiter(',');
      sub->add_option("--m-rule", args.m_rule, "Inequalities per variable")->capture_default_str();
      sub->add_option("--offset-mode", args.offset_mode, "negate_abs|shift")->capture_default_str();
    }
    flags.attach(sub);
    return sub;
  };
  BenchArgs lp_args, traj_args;
  SolverFlags lp_flags, traj_flags;
  CLI::App* bench_lp = add_bench("bench-lp", "Random LP benchmark", lp_args, lp_flags, false);
  CLI::App* bench_traj =
      add_bench("bench-traj", "Toy trajectory benchmark", traj_args, traj_flags, true);

  CheckGradArgs grad_args;
  CLI::App* check_grad = app.add_subcommand("check-grad", "Compare derivatives with finite differences");
  check_grad->add_option("file", grad_args.file, "Problem file (JSON)")->required();
  check_grad->add_option("--point", grad_args.point, "Evaluation point")->delimiter(',');
  check_grad->add_flag("--random-point", grad_args.random_point,
                       "Perturb the start point by N(0,1) noise");
  check_grad->add_option("--seed", grad_args.seed, "Seed for --random-point")->capture_default_str();
  check_grad->add_option("--eps", grad_args.eps, "Difference step")->capture_default_str();
  check_grad->add_option("--tol", grad_args.tol, "Failure threshold")->capture_default_str();

  std::string oracle_file;
  CLI::App* oracle = app.add_subcommand("oracle", "Solve an LP file by vertex enumeration");
  oracle->add_option("file", oracle_file, "LP file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  std::string path;
  try {
    if (*solve) {
      path = solve_args.file;
      return cmd_solve(solve_args, solve_flags, verbosity);
    }
    if (*bench_lp) {
      path = lp_args.config_path;
      return cmd_bench(lp_args, lp_flags, false, verbosity);
    }
    if (*bench_traj) {
      path = traj_args.config_path;
      return cmd_bench(traj_args, traj_flags, true, verbosity);
    }
    if (*check_grad) {
      path = grad_args.file;
      return cmd_check_grad(grad_args);
    }
    if (*oracle) {
      path = oracle_file;
      return cmd_oracle(oracle_file);
    }
  } catch (const aula::ProblemParseError& err) {
    return report_parse_error(err, path);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
