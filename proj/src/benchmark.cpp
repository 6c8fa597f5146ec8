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

#include "aula/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace aula {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Instance {
  SolverOptions solver;
  std::string family;
  int n = 0;
  int m = 0;
  std::uint64_t seed = 0;
  std::function<LoadedProblem()> build;
};

std::vector<Instance> enumerate_instances(const BenchmarkConfig& config) {
  std::vector<Instance> out;
  if (config.random_lp) {
    const RandomLpFamily fam = *config.random_lp;
    SolverOptions solver = config.solver;
    apply_solver_overrides(fam.solver_overrides, solver);
    for (int n : fam.n_list) {
      const int m = std::max(1, static_cast<int>(std::lround(fam.m_rule * n)));
      for (int r = 0; r < fam.repetitions; ++r) {
        RandomLpSpec spec{n, m, 0, fam.offset_mode};
        for (std::uint64_t attempt = 0;; ++attempt) {
          spec.seed = mix_seed(fam.base_seed,
                               (static_cast<std::uint64_t>(n) << 40) ^
                                   (static_cast<std::uint64_t>(r) << 20) ^ attempt);
          if (!fam.skip_unbounded || lp_is_bounded(random_lp_program(spec)) || attempt > 1000) {
            break;
          }
        }
        out.push_back({solver, "random_lp", n, m, spec.seed, [spec]() {
                         return LoadedProblem{gen_random_lp(spec), VectorXd::Zero(spec.n),
                                              "random_lp"};
                       }});
      }
    }
  }
  if (config.toy_traj) {
    const ToyTrajectoryFamily fam = *config.toy_traj;
    SolverOptions solver = config.solver;
    apply_solver_overrides(fam.solver_overrides, solver);
    const int span = std::max(1, fam.max_obstacles - fam.min_obstacles + 1);
    for (int r = 0; r < fam.repetitions; ++r) {
      const std::uint64_t seed = mix_seed(fam.base_seed, static_cast<std::uint64_t>(r));
      const int obstacles = fam.min_obstacles + r % span;
      const ToyTrajectorySpec spec =
          random_toy_trajectory(seed, fam.T, fam.d, obstacles,
                                fam.smoothness_weight.value_or(fam.T - 1.0));
      out.push_back({solver, "toy_traj", fam.T * fam.d, fam.T * obstacles, seed, [spec]() {
                       return LoadedProblem{gen_toy_trajectory(spec),
                                            straight_line_trajectory(spec), "toy_traj"};
                     }});
    }
  }
  return out;
}

BenchmarkRow run_one(const Instance& inst, int index, Method method) {
  BenchmarkRow row;
  row.instance = index;
  row.method = method;
  row.family = inst.family;
  row.n = inst.n;
  row.m = inst.m;
  row.seed = inst.seed;
  SolverOptions opts = inst.solver;
  opts.method = method;
  LoadedProblem loaded = inst.build();
  try {
    const Solution sol = solve(loaded.problem, *loaded.x0, opts);
    row.f_evals = sol.f_evals;
    row.dual_updates = sol.dual_updates;
    row.f_final = sol.f_final;
    row.violation = sol.violation;
    row.status = sol.status;
    row.failure = sol.failure;
  } catch (const std::exception&) {
    row.f_evals = loaded.problem.evaluation_count();
    row.f_final = kNaN;
    row.violation = kNaN;
    row.status = SolveStatus::failed;
    row.failure = FailureReason::evaluation_error;
  }
  return row;
}

std::string format_double(double v, const char* fmt) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string status_text(const BenchmarkRow& row) {
  if (row.status == SolveStatus::failed && row.failure != FailureReason::none) {
    return "failed:" + to_string(row.failure);
  }
  return to_string(row.status);
}

std::vector<double> as_vector_of_doubles(const json& node, const char* key) {
  if (!node.is_array()) throw std::invalid_argument(std::string(key) + " must be an array");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(v.get<double>());
  return out;
}

}  // namespace

MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr out;
  double sum = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++out.count;
    }
  }
  if (out.count == 0) {
    out.mean = kNaN;
    out.stderr_ = kNaN;
    return out;
  }
  out.mean = sum / out.count;
  if (out.count > 1) {
    double ss = 0.0;
    for (double v : values) {
      if (std::isfinite(v)) ss += (v - out.mean) * (v - out.mean);
    }
    out.stderr_ = std::sqrt(ss / (out.count - 1)) / std::sqrt(static_cast<double>(out.count));
  }
  return out;
}

BenchmarkTable run_benchmark(const BenchmarkConfig& config) {
  config.solver.validate();
  if (config.methods.empty()) throw std::invalid_argument("benchmark lists no methods");
  const std::vector<Instance> instances = enumerate_instances(config);
  const size_t methods = config.methods.size();
  const size_t tasks = instances.size() * methods;

  BenchmarkTable table;
  table.rows.resize(tasks);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) {
      const size_t i = t / methods;
      table.rows[t] = run_one(instances[i], static_cast<int>(i), config.methods[t % methods]);
    }
  };
  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (size_t i = 0; i < instances.size(); ++i) {
    const double tol = instances[i].solver.outer_tol;
    auto eligible = [tol](const BenchmarkRow& row) {
      return row.status == SolveStatus::converged ||
             (row.status == SolveStatus::max_iter && row.violation < tol);
    };
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < methods; ++k) {
      const BenchmarkRow& row = table.rows[i * methods + k];
      if (eligible(row)) best = std::min(best, row.f_final);
    }
    for (size_t k = 0; k < methods; ++k) {
      BenchmarkRow& row = table.rows[i * methods + k];
      row.suboptimality = eligible(row) && std::isfinite(best) ? row.f_final - best : kNaN;
    }
  }

  // Group per (family, n) in order of first appearance.
  std::vector<std::pair<std::string, int>> groups;
  for (const auto& inst : instances) {
    const std::pair<std::string, int> key{inst.family, inst.n};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }
  for (const auto& [family, n] : groups) {
    for (Method method : config.methods) {
      AggregateRow agg;
      agg.method = method;
      agg.family = family;
      agg.n = n;
      std::vector<double> evals, updates, subopt, viol;
      for (const auto& row : table.rows) {
        if (row.family != family || row.n != n || row.method != method) continue;
        ++agg.instances;
        if (row.status == SolveStatus::converged) ++agg.converged;
        evals.push_back(static_cast<double>(row.f_evals));
        updates.push_back(row.dual_updates);
        subopt.push_back(row.suboptimality);
        viol.push_back(row.violation);
      }
      agg.f_evals = mean_stderr(evals);
      agg.dual_updates = mean_stderr(updates);
      agg.suboptimality = mean_stderr(subopt);
      agg.violation = mean_stderr(viol);
      table.aggregates.push_back(agg);
    }
  }
  return table;
}

void write_benchmark_csv(std::ostream& os, const BenchmarkTable& table) {
  os << "method,family,n,m,seed,f_evals,dual_updates,f_final,suboptimality,violation,status\n";
  for (const auto& row : table.rows) {
    os << to_string(row.method) << ',' << row.family << ',' << row.n << ',' << row.m << ','
       << row.seed << ',' << row.f_evals << ',' << row.dual_updates << ','
       << format_double(row.f_final, "%.10g") << ','
       << format_double(row.suboptimality, "%.6g") << ','
       << format_double(row.violation, "%.6e") << ',' << status_text(row) << '\n';
  }
}

void write_benchmark_summary(std::ostream& os, const BenchmarkTable& table) {
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %4s  %-12s %22s %20s %22s %10s\n", "family", "n",
                "method", "f_evals", "dual_updates", "suboptimality", "converged");
  os << line;
  for (const auto& a : table.aggregates) {
    const std::string evals = format_double(a.f_evals.mean, "%.2f") + " +/- " +
                              format_double(a.f_evals.stderr_, "%.2f");
    const std::string upd = format_double(a.dual_updates.mean, "%.2f") + " +/- " +
                            format_double(a.dual_updates.stderr_, "%.2f");
    const std::string sub = format_double(a.suboptimality.mean, "%.4g") + " +/- " +
                            format_double(a.suboptimality.stderr_, "%.2g");
    const std::string conv = std::to_string(a.converged) + "/" + std::to_string(a.instances);
    std::snprintf(line, sizeof(line), "%-10s %4d  %-12s %22s %20s %22s %10s\n", a.family.c_str(),
                  a.n, to_string(a.method).c_str(), evals.c_str(), upd.c_str(), sub.c_str(),
                  conv.c_str());
    os << line;
  }
}

void apply_solver_overrides(const json& node, SolverOptions& opts) {
  if (!node.is_object()) throw std::invalid_argument("solver overrides must be an object");
  for (const auto& [key, value] : node.items()) {
    if (key == "method") {
      opts.method = parse_method(value.get<std::string>());
    } else if (key == "mu0") {
      opts.mu0 = value.get<double>();
    } else if (key == "nu0") {
      opts.nu0 = value.get<double>();
    } else if (key == "mu_growth") {
      opts.mu_growth = value.get<double>();
    } else if (key == "barrier_mu0") {
      opts.barrier_mu0 = value.get<double>();
    } else if (key == "barrier_shrink") {
      opts.barrier_shrink = value.get<double>();
    } else if (key == "outer_tol") {
      opts.outer_tol = value.get<double>();
    } else if (key == "delta_double") {
      opts.delta_double = value.get<double>();
    } else if (key == "max_outer") {
      opts.max_outer = value.get<int>();
    } else if (key == "anytime_steps_per_update") {
      opts.anytime_steps_per_update = value.get<int>();
    } else if (key == "reset_delta") {
      opts.reset_delta = value.get<bool>();
    } else if (key == "hessian_mode") {
      const auto mode = value.get<std::string>();
      if (mode != "gauss_newton" && mode != "full") {
        throw std::invalid_argument("hessian_mode must be gauss_newton or full");
      }
      opts.hessian_mode = mode == "full" ? HessianMode::full : HessianMode::gauss_newton;
    } else if (key == "row_selection") {
      const auto sel = value.get<std::string>();
      if (sel != "mask" && sel != "positive_multipliers") {
        throw std::invalid_argument("row_selection must be mask or positive_multipliers");
      }
      opts.row_selection =
          sel == "mask" ? RowSelection::mask : RowSelection::positive_multipliers;
    } else if (key == "newton") {
      if (!value.is_object()) throw std::invalid_argument("solver.newton must be an object");
      NewtonParams& p = opts.newton;
      for (const auto& [nk, nv] : value.items()) {
        if (nk == "alpha0") p.alpha0 = nv.get<double>();
        else if (nk == "beta0") p.beta0 = nv.get<double>();
        else if (nk == "alpha_plus") p.alpha_plus = nv.get<double>();
        else if (nk == "alpha_minus") p.alpha_minus = nv.get<double>();
        else if (nk == "beta_plus") p.beta_plus = nv.get<double>();
        else if (nk == "beta_minus") p.beta_minus = nv.get<double>();
        else if (nk == "rho") p.rho = nv.get<double>();
        else if (nk == "delta") p.delta = nv.get<double>();
        else if (nk == "max_evals") p.max_evals = nv.get<std::int64_t>();
        else if (nk == "failure_ratio") p.failure_ratio = nv.get<double>();
        else throw std::invalid_argument("unknown newton option '" + nk + "'");
      }
    } else {
      throw std::invalid_argument("unknown solver option '" + key + "'");
    }
  }
  opts.validate();
}

BenchmarkConfig parse_benchmark_config(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("benchmark config must be an object");
  BenchmarkConfig config;
  if (doc.contains("methods")) {
    config.methods.clear();
    for (const auto& m : doc.at("methods")) config.methods.push_back(parse_method(m.get<std::string>()));
  }
  if (doc.contains("families")) {
    const json& fam = doc.at("families");
    if (fam.contains("random_lp")) {
      const json& node = fam.at("random_lp");
      RandomLpFamily lp;
      if (node.contains("n_list")) {
        lp.n_list.clear();
        for (double v : as_vector_of_doubles(node.at("n_list"), "n_list")) {
          lp.n_list.push_back(static_cast<int>(v));
        }
      }
      if (node.contains("m_rule")) lp.m_rule = node.at("m_rule").get<double>();
      if (node.contains("repetitions")) lp.repetitions = node.at("repetitions").get<int>();
      if (node.contains("base_seed")) lp.base_seed = node.at("base_seed").get<std::uint64_t>();
      if (node.contains("offset_mode")) {
        lp.offset_mode = parse_offset_mode(node.at("offset_mode").get<std::string>());
      }
      if (node.contains("skip_unbounded")) lp.skip_unbounded = node.at("skip_unbounded").get<bool>();
      if (node.contains("solver")) lp.solver_overrides = node.at("solver");
      config.random_lp = lp;
    }
    if (fam.contains("toy_traj")) {
      const json& node = fam.at("toy_traj");
      ToyTrajectoryFamily traj;
      if (node.contains("T")) traj.T = node.at("T").get<int>();
      if (node.contains("d")) traj.d = node.at("d").get<int>();
      if (node.contains("min_obstacles")) traj.min_obstacles = node.at("min_obstacles").get<int>();
      if (node.contains("max_obstacles")) traj.max_obstacles = node.at("max_obstacles").get<int>();
      if (node.contains("repetitions")) traj.repetitions = node.at("repetitions").get<int>();
      if (node.contains("base_seed")) traj.base_seed = node.at("base_seed").get<std::uint64_t>();
      if (node.contains("smoothness_weight")) {
        traj.smoothness_weight = node.at("smoothness_weight").get<double>();
      }
      if (node.contains("solver")) traj.solver_overrides.update(node.at("solver"));
      config.toy_traj = traj;
    }
  }
  if (doc.contains("solver")) apply_solver_overrides(doc.at("solver"), config.solver);
  if (doc.contains("jobs")) config.jobs = doc.at("jobs").get<int>();
  return config;
}

BenchmarkConfig load_benchmark_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open benchmark config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("benchmark config: ") + err.what());
  }
  return parse_benchmark_config(doc);
}

void register_builtin_problems(ProblemRegistry& registry) {
  registry.add("toy_trajectory", [](const json& params) {
    ToyTrajectorySpec spec;
    if (params.contains("obstacles") && params.at("obstacles").is_array()) {
      spec.T = params.value("T", 40);
      spec.d = params.value("d", 2);
      spec.smoothness_weight = params.value("smoothness_weight", 1.0);
      const auto s = as_vector_of_doubles(params.at("start"), "start");
      const auto g = as_vector_of_doubles(params.at("goal"), "goal");
      spec.start = Eigen::Map<const VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
      spec.goal = Eigen::Map<const VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
      for (const auto& ob : params.at("obstacles")) {
        const auto c = as_vector_of_doubles(ob.at("center"), "center");
        spec.obstacles.push_back(
            {Eigen::Map<const VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())),
             ob.at("radius").get<double>()});
      }
    } else {
      spec = random_toy_trajectory(params.value("seed", std::uint64_t{1}), params.value("T", 40),
                                   params.value("d", 2), params.value("obstacles", 1),
                                   params.value("smoothness_weight", 1.0));
    }
    return LoadedProblem{gen_toy_trajectory(spec), straight_line_trajectory(spec), ""};
  });
  registry.add("random_lp", [](const json& params) {
    RandomLpSpec spec;
    spec.n = params.value("n", 2);
    spec.m = params.value("m", 3 * spec.n);
    spec.seed = params.value("seed", std::uint64_t{0});
    spec.offset_mode = parse_offset_mode(params.value("offset_mode", std::string("negate_abs")));
    return LoadedProblem{gen_random_lp(spec), VectorXd::Zero(spec.n), ""};
  });
}

}  // namespace aula
