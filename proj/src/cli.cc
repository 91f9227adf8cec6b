// Copyright 2026 The PCDN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pcdn/cli.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "pcdn/bench.h"
#include "pcdn/error.h"
#include "pcdn/model_io.h"
#include "pcdn/solver.h"
#include "pcdn/sparse_data.h"
#include "pcdn/theory.h"
#include "pcdn/worker_pool.h"

namespace pcdn {

namespace {

std::string g16(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16g", v);
  return buf;
}

// Flags shared by train and benchmark.
struct SolverFlags {
  std::string data;
  std::string solver = "pcdn";
  std::string loss = "logistic";
  double c = 1.0;
  std::size_t P = 1;
  std::size_t pbar = 8;
  double epsilon = 1e-3;
  std::size_t threads = 0;  // 0: PCDN_THREADS or hardware concurrency
  std::uint64_t seed = 1;
  std::size_t max_outer = 1000;
  double beta = 0.5;
  double sigma = 0.01;
  double gamma = 0.0;
  std::string trace;
  bool trace_timings = true;
  std::string stopping = "subgradient";
  std::string reference;
  bool normalize = false;
};

void add_armijo_flags(CLI::App* app, double& beta, double& sigma,
                      double& gamma) {
  app->add_option("--beta", beta, "Backtracking factor in (0,1)")
      ->capture_default_str();
  app->add_option("--sigma", sigma, "Sufficient decrease constant in (0,1)")
      ->capture_default_str();
  app->add_option("--gamma", gamma, "Curvature weight in [0,1)")
      ->capture_default_str();
}

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("data", f.data, "Training data (LIBSVM text, .gz ok)")
      ->required();
  app->add_option("--solver", f.solver, "pcdn | cdn | scdn")
      ->check(CLI::IsMember({"pcdn", "cdn", "scdn"}))
      ->capture_default_str();
  app->add_option("--loss", f.loss, "logistic | l2svm")
      ->check(CLI::IsMember({"logistic", "l2svm"}))
      ->capture_default_str();
  app->add_option("-c", f.c, "Loss weight c > 0")->capture_default_str();
  app->add_option("-P", f.P, "Bundle size in [1, n]")->capture_default_str();
  app->add_option("--pbar", f.pbar, "Shotgun parallel updates")
      ->capture_default_str();
  app->add_option("--epsilon", f.epsilon, "Stopping tolerance")
      ->capture_default_str();
  app->add_option("--threads", f.threads,
                  "Worker threads (default: PCDN_THREADS or all cores)");
  app->add_option("--seed", f.seed, "Master random seed")
      ->capture_default_str();
  app->add_option("--max-outer", f.max_outer, "Outer iteration budget")
      ->capture_default_str();
  add_armijo_flags(app, f.beta, f.sigma, f.gamma);
  app->add_option("--trace", f.trace, "Write the iteration trace CSV here");
  app->add_flag("!--trace-no-timings", f.trace_timings,
                "Write zeros in the trace timing columns");
  app->add_option("--stopping", f.stopping, "subgradient | gap")
      ->check(CLI::IsMember({"subgradient", "gap"}))
      ->capture_default_str();
  app->add_option("--reference", f.reference,
                  "File holding the optimal objective F*");
  app->add_flag("--normalize", f.normalize, "Scale samples to unit norm");
}

std::size_t resolve_threads(std::size_t flag) {
  return flag == 0 ? default_thread_count() : flag;
}

Dataset load_data(const std::string& path, bool normalize, std::ostream& err) {
  ParseOptions options;
  options.warn = [&err, path](const std::string& message) {
    err << path << ": warning: " << message << '\n';
  };
  Dataset data = load_libsvm(path, options);
  return normalize ? normalize_samples(data) : data;
}

double read_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference file " + path);
  double value = 0.0;
  if (!(in >> value)) {
    throw std::runtime_error("reference file " + path + " holds no number");
  }
  return value;
}

void write_reference(const std::string& path, double value) {
  std::ofstream out(path);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g\n", value);
  out << buf;
  if (!out) throw std::runtime_error("failed writing " + path);
}

void write_trace(const std::string& path, const SolveResult& result,
                 bool timings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_trace_csv(out, result.traces, {timings});
  if (!out) throw std::runtime_error("failed writing " + path);
}

SolverConfig make_config(const SolverFlags& f) {
  SolverConfig config;
  config.solver = parse_solver_kind(f.solver);
  config.bundle_size = f.P;
  config.scdn_parallel = f.pbar;
  config.threads = resolve_threads(f.threads);
  config.seed = f.seed;
  config.epsilon = f.epsilon;
  config.max_outer_iters = f.max_outer;
  config.armijo.beta = f.beta;
  config.armijo.sigma = f.sigma;
  config.armijo.gamma = f.gamma;
  config.stopping = parse_stopping_mode(f.stopping);
  if (!f.reference.empty()) {
    config.reference_objective = read_reference(f.reference);
  }
  return config;
}

int status_code(SolveStatus status) {
  return status == SolveStatus::kConverged ? kExitOk : kExitBudget;
}

void print_summary(std::ostream& out, const SolveResult& result) {
  out << "status "
      << (result.status == SolveStatus::kConverged ? "converged" : "budget")
      << '\n'
      << "objective " << g16(result.objective) << '\n'
      << "outer_iterations " << result.outer_iterations << '\n'
      << "inner_iterations " << result.inner_iterations << '\n'
      << "nnz " << count_nonzeros(result.w) << '\n'
      << "mean_q " << g16(result.stats.mean_q()) << '\n';
}

int cmd_train(const SolverFlags& f, const std::string& model_path,
              std::ostream& out, std::ostream& err) {
  const Dataset data = load_data(f.data, f.normalize, err);
  const auto spec = LossSpec::make(parse_loss_kind(f.loss), f.c);
  const auto config = make_config(f);
  const auto result = solve(spec, data, config);
  save_model(model_path, Model{spec.kind, spec.c, result.w});
  if (!f.trace.empty()) write_trace(f.trace, result, f.trace_timings);
  print_summary(out, result);
  return status_code(result.status);
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& predictions_path, std::ostream& out,
                std::ostream& err) {
  const Model model = load_model(model_path);
  const Dataset data = load_data(data_path, false, err);
  out << "accuracy " << g16(accuracy(model.w, data)) << '\n'
      << "samples " << data.n_samples() << '\n';
  if (!predictions_path.empty()) {
    std::ofstream file(predictions_path);
    if (!file) throw std::runtime_error("cannot open " + predictions_path);
    for (auto y : predict(model.w, data)) file << (y > 0 ? "+1" : "-1") << '\n';
    if (!file) throw std::runtime_error("failed writing " + predictions_path);
  }
  return kExitOk;
}

int cmd_benchmark(const SolverFlags& f, double test_fraction,
                  const std::string& save_reference, std::ostream& out,
                  std::ostream& err) {
  Dataset data = load_data(f.data, f.normalize, err);
  std::optional<Dataset> test;
  if (test_fraction > 0.0) {
    auto split = train_test_split(data, test_fraction, f.seed);
    data = std::move(split.train);
    test = std::move(split.test);
  }
  const auto spec = LossSpec::make(parse_loss_kind(f.loss), f.c);
  auto config = make_config(f);
  if (!config.reference_objective) {
    ReferenceOptions options;
    options.seed = f.seed;
    options.threads = config.threads;
    config.reference_objective = reference_solve(spec, data, options).objective;
  }
  const double reference = *config.reference_objective;
  if (!save_reference.empty()) write_reference(save_reference, reference);

  const auto result = solve(spec, data, config);
  const auto record = make_run_record(spec, config, result, reference,
                                      test ? &*test : nullptr);
  if (!f.trace.empty()) write_trace(f.trace, result, f.trace_timings);
  out << "solver " << to_string(config.solver) << '\n'
      << "reference_objective " << g16(reference) << '\n';
  print_summary(out, result);
  out << "rel_gap " << g16(relative_gap(result.objective, reference)) << '\n'
      << "rel_gap_raw " << g16(relative_gap_raw(result.objective, reference))
      << '\n'
      << "wall_ms "
      << g16(result.traces.empty() ? 0.0 : result.traces.back().wall_ms)
      << '\n';
  if (record.test_accuracy) {
    out << "test_accuracy " << g16(*record.test_accuracy) << '\n';
  }
  return status_code(result.status);
}

struct SweepFlags {
  std::string data;
  std::string loss = "logistic";
  double c = 1.0;
  std::vector<std::size_t> P_list;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double epsilon = 1e-3;
  std::size_t threads = 0;
  std::size_t max_outer = 1000;
  double beta = 0.5;
  double sigma = 0.01;
  double gamma = 0.0;
  std::string reference;
  std::string output;
  bool normalize = false;
};

int cmd_sweep(const SweepFlags& f, std::ostream& out, std::ostream& err) {
  const Dataset data = load_data(f.data, f.normalize, err);
  const auto spec = LossSpec::make(parse_loss_kind(f.loss), f.c);
  const auto threads = resolve_threads(f.threads);
  double reference = 0.0;
  if (!f.reference.empty()) {
    reference = read_reference(f.reference);
  } else {
    ReferenceOptions options;
    options.threads = threads;
    reference = reference_solve(spec, data, options).objective;
  }
  SweepOptions options;
  options.P_list = f.P_list;
  options.seeds = f.seeds;
  options.epsilon = f.epsilon;
  options.threads = threads;
  options.max_outer_iters = f.max_outer;
  options.armijo.beta = f.beta;
  options.armijo.sigma = f.sigma;
  options.armijo.gamma = f.gamma;
  const auto table = sweep_P(spec, data, reference, options);
  if (f.output.empty()) {
    write_sweep_csv(out, table.rows);
    return kExitOk;
  }
  std::ofstream file(f.output, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + f.output);
  write_sweep_csv(file, table.rows);
  if (!file) throw std::runtime_error("failed writing " + f.output);
  out << "reference_objective " << g16(reference) << '\n';
  for (const auto& s : table.summary) {
    out << "P " << s.P << " median_T_eps " << g16(s.median_T_eps)
        << " converged " << (s.all_converged ? "all" : "partial")
        << " mean_q " << g16(s.mean_q) << " E_lambda_bar_over_P "
        << g16(s.E_lambda_bar_over_P) << '\n';
  }
  return kExitOk;
}

struct OracleFlags {
  std::vector<double> lambdas;
  std::string spectrum;
  std::string data;
  std::size_t P = 1;
  double h_lower = 0.0;
  std::string loss = "logistic";
  double c = 1.0;
  double beta = 0.5;
  double sigma = 0.01;
  double gamma = 0.0;
};

int cmd_oracle(const OracleFlags& f, std::ostream& out, std::ostream& err) {
  const int sources =
      int(!f.lambdas.empty()) + int(!f.spectrum.empty()) + int(!f.data.empty());
  if (sources != 1) {
    throw ConfigError(
        "give exactly one of --lambdas, --spectrum or --data");
  }
  std::vector<double> values = f.lambdas;
  if (!f.spectrum.empty()) {
    std::ifstream in(f.spectrum);
    if (!in) throw std::runtime_error("cannot open " + f.spectrum);
    double v = 0.0;
    while (in >> v) values.push_back(v);
    if (!in.eof()) throw std::runtime_error(f.spectrum + ": bad number");
  } else if (!f.data.empty()) {
    values = column_squared_norms(load_data(f.data, false, err).matrix).lambda;
  }
  const LambdaSpectrum spectrum(std::move(values));
  out << g16(expected_max_lambda(spectrum, f.P)) << '\n';
  if (f.h_lower > 0.0) {
    const auto spec = LossSpec::make(parse_loss_kind(f.loss), f.c);
    ArmijoParams armijo;
    armijo.beta = f.beta;
    armijo.sigma = f.sigma;
    armijo.gamma = f.gamma;
    out << "q_bound "
        << g16(line_search_step_bound(f.P, spectrum, spec.theta, spec.c,
                                      f.h_lower, armijo))
        << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Parallel coordinate descent Newton for l1-regularized "
               "logistic regression and l2-loss SVM"};
  app.name(args.empty() ? "pcdn" : args[0]);
  app.require_subcommand(1);

  SolverFlags train_flags;
  std::string model_out;
  auto* train = app.add_subcommand("train", "Train a model");
  add_solver_flags(train, train_flags);
  train->add_option("-o,--output", model_out, "Model file to write")
      ->required();

  std::string model_in;
  std::string predict_data;
  std::string predictions;
  auto* predict_cmd = app.add_subcommand("predict", "Evaluate a model");
  predict_cmd->add_option("data", predict_data, "Test data")->required();
  predict_cmd->add_option("-m,--model", model_in, "Model file")->required();
  predict_cmd->add_option("--predictions", predictions,
                          "Write one predicted label per line here");

  SolverFlags bench_flags;
  double test_fraction = 0.0;
  std::string save_reference;
  auto* bench = app.add_subcommand(
      "benchmark", "Reference solve, then a traced solver run");
  add_solver_flags(bench, bench_flags);
  bench->add_option("--test-fraction", test_fraction,
                    "Hold out this fraction of samples for test accuracy");
  bench->add_option("--save-reference", save_reference,
                    "Write the reference objective to this file");

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Iterations to reach a gap vs P");
  sweep->add_option("data", sweep_flags.data, "Training data")->required();
  sweep->add_option("--loss", sweep_flags.loss, "logistic | l2svm")
      ->check(CLI::IsMember({"logistic", "l2svm"}))
      ->capture_default_str();
  sweep->add_option("-c", sweep_flags.c, "Loss weight c > 0")
      ->capture_default_str();
  sweep->add_option("-P,--P", sweep_flags.P_list, "Bundle sizes, e.g. 1,8,32")
      ->delimiter(',')
      ->required();
  sweep->add_option("--seeds", sweep_flags.seeds, "Seeds, e.g. 1,2,3")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--epsilon", sweep_flags.epsilon,
                    "Relative gap target")
      ->capture_default_str();
  sweep->add_option("--threads", sweep_flags.threads, "Worker threads");
  sweep->add_option("--max-outer", sweep_flags.max_outer,
                    "Outer iteration budget per run")
      ->capture_default_str();
  add_armijo_flags(sweep, sweep_flags.beta, sweep_flags.sigma,
                   sweep_flags.gamma);
  sweep->add_option("--reference", sweep_flags.reference,
                    "File holding F* (solved if absent)");
  sweep->add_option("-o,--output", sweep_flags.output,
                    "CSV destination (stdout if absent)");
  sweep->add_flag("--normalize", sweep_flags.normalize,
                  "Scale samples to unit norm");

  OracleFlags oracle_flags;
  auto* oracle = app.add_subcommand(
      "oracle", "Expected bundle max of column norms and step bound");
  oracle->add_option("--lambdas", oracle_flags.lambdas,
                     "Comma-separated spectrum")
      ->delimiter(',');
  oracle->add_option("--spectrum", oracle_flags.spectrum,
                     "File of whitespace-separated spectrum values");
  oracle->add_option("--data", oracle_flags.data,
                     "LIBSVM data; uses its column squared norms");
  oracle->add_option("-P", oracle_flags.P, "Bundle size")->required();
  oracle->add_option("--h-lower", oracle_flags.h_lower,
                     "Hessian lower bound; also prints the step bound");
  oracle->add_option("--loss", oracle_flags.loss, "logistic | l2svm")
      ->check(CLI::IsMember({"logistic", "l2svm"}))
      ->capture_default_str();
  oracle->add_option("-c", oracle_flags.c, "Loss weight")
      ->capture_default_str();
  add_armijo_flags(oracle, oracle_flags.beta, oracle_flags.sigma,
                   oracle_flags.gamma);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("pcdn");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(train_flags, model_out, out, err);
    if (*predict_cmd) {
      return cmd_predict(model_in, predict_data, predictions, out, err);
    }
    if (*bench) {
      return cmd_benchmark(bench_flags, test_fraction, save_reference, out,
                           err);
    }
    if (*sweep) return cmd_sweep(sweep_flags, out, err);
    if (*oracle) return cmd_oracle(oracle_flags, out, err);
  } catch (const LineSearchError& e) {
    err << "error: line search failed: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ReferenceBudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace pcdn
