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

#include "pcdn/solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pcdn/error.h"
#include "pcdn/rng.h"

namespace pcdn {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since)
      .count();
}

double clamped_gap(double objective, const std::optional<double>& reference) {
  if (!reference) return std::numeric_limits<double>::quiet_NaN();
  return std::max(0.0, (objective - *reference) / *reference);
}

}  // namespace

std::size_t count_nonzeros(std::span<const double> w) {
  return static_cast<std::size_t>(
      std::count_if(w.begin(), w.end(), [](double v) { return v != 0.0; }));
}

StoppingRule::StoppingRule(const LossSpec& spec, const Dataset& data,
                           const SolverConfig& config,
                           const ModelState& initial)
    : spec_(spec),
      data_(data),
      mode_(config.stopping),
      epsilon_(config.epsilon),
      reference_(config.reference_objective) {
  if (mode_ == StoppingMode::kReferenceGap) {
    if (!(reference_ && *reference_ > 0.0)) {
      throw ConfigError(
          "gap stopping requires a positive reference objective");
    }
  }
  initial_subgradient_ = min_norm_subgradient_l1(spec_, data_, initial);
  last_subgradient_ = initial_subgradient_;
}

bool StoppingRule::satisfied(const ModelState& state) {
  if (mode_ == StoppingMode::kReferenceGap) {
    return (state.objective_value() - *reference_) / *reference_ <= epsilon_;
  }
  last_subgradient_ = min_norm_subgradient_l1(spec_, data_, state);
  return last_subgradient_ <= epsilon_ * initial_subgradient_;
}

bool check_stop(const LossSpec& spec, const Dataset& data,
                const ModelState& state, const SolverConfig& config,
                std::optional<double> reference_objective) {
  SolverConfig copy = config;
  copy.reference_objective = reference_objective;
  const ModelState zero = make_state(spec, data);
  StoppingRule rule(spec, data, copy, zero);
  return rule.satisfied(state);
}

SolveResult pcdn_solve(const LossSpec& spec, const Dataset& data,
                       const SolverConfig& config) {
  spec.validate();
  config.validate(data.n_features());
  const auto start = Clock::now();
  const auto n = data.n_features();
  const auto P = config.bundle_size;

  WorkerPool pool(config.threads);
  const auto norms = column_squared_norms(data.matrix);
  BundleStepper stepper(spec, data, norms, pool);
  ModelState state = make_state(spec, data);
  StoppingRule stop(spec, data, config, state);
  auto rng = make_engine(config.seed, Stream::kPartition);

  SolveResult result;
  RunStats& stats = result.stats;
  stats.initial_objective = state.objective_value();
  stats.initial_subgradient = stop.initial_subgradient();
  stats.min_hessian = std::numeric_limits<double>::infinity();
  stats.inf_alpha = std::numeric_limits<double>::infinity();
  result.outer_objectives.push_back(state.objective_value());

  std::size_t nnz = 0;
  std::size_t t = 0;
  std::size_t k = 0;
  for (;; ++k) {
    if (stop.satisfied(state)) {
      result.status = SolveStatus::kConverged;
      break;
    }
    if (k >= config.max_outer_iters) {
      result.status = SolveStatus::kBudgetExhausted;
      break;
    }
    const auto schedule = config.cyclic_order
                              ? cyclic_partition(n, P)
                              : partition_features(n, P, rng);
    for (std::size_t b = 0; b < schedule.bundle_count(); ++b, ++t) {
      const auto bundle = schedule.bundle(b);
      IterationTrace trace;
      trace.t = t;
      trace.k = k;

      const auto dc_start = Clock::now();
      const auto dir = stepper.compute_direction(state, bundle, config.armijo);
      trace.t_dc_ms = elapsed_ms(dc_start);
      trace.lambda_bar = dir.lambda_bar;
      for (double h : dir.hess) {
        stats.min_hessian = std::min(stats.min_hessian, h);
        stats.max_hessian = std::max(stats.max_hessian, h);
      }

      if (!dir.is_zero()) {
        std::size_t before = 0;
        for (auto j : bundle) before += state.w[j] != 0.0;
        const auto ls_start = Clock::now();
        const auto ls = stepper.line_search(state, dir, config.armijo);
        trace.t_ls_ms = elapsed_ms(ls_start);
        std::size_t after = 0;
        for (auto j : bundle) after += state.w[j] != 0.0;
        nnz = nnz + after - before;
        trace.alpha = ls.alpha;
        trace.q = ls.steps;
        stats.line_search_steps += static_cast<std::size_t>(ls.steps);
        ++stats.line_searches;
        stats.inf_alpha = std::min(stats.inf_alpha, ls.alpha);
        stats.sup_alpha = std::max(stats.sup_alpha, ls.alpha);
      }
      trace.objective = state.objective_value();
      trace.rel_gap = clamped_gap(trace.objective, config.reference_objective);
      trace.nnz = nnz;
      trace.wall_ms = elapsed_ms(start);
      result.traces.push_back(trace);
    }
    if ((k + 1) % config.refresh_interval == 0) {
      refresh_cache(spec, data, state);
    }
    if (!std::isfinite(state.objective_value())) {
      throw DivergenceError("objective became non-finite",
                            state.objective_value());
    }
    result.outer_objectives.push_back(state.objective_value());
  }

  if (stats.line_searches == 0) stats.inf_alpha = 0.0;
  if (!std::isfinite(stats.min_hessian)) stats.min_hessian = 0.0;
  stats.final_subgradient = min_norm_subgradient_l1(spec, data, state);
  result.outer_iterations = k;
  result.inner_iterations = t;
  result.objective = state.objective_value();
  result.w = std::move(state.w);
  return result;
}

SolveResult cdn_solve(const LossSpec& spec, const Dataset& data,
                      const SolverConfig& config) {
  SolverConfig cdn = config;
  cdn.solver = SolverKind::kPcdn;
  cdn.bundle_size = 1;
  return pcdn_solve(spec, data, cdn);
}

SolveResult solve(const LossSpec& spec, const Dataset& data,
                  const SolverConfig& config) {
  switch (config.solver) {
    case SolverKind::kPcdn:
      return pcdn_solve(spec, data, config);
    case SolverKind::kCdn:
      return cdn_solve(spec, data, config);
    case SolverKind::kScdn:
      return scdn_solve(spec, data, config);
  }
  throw ConfigError("unknown solver");
}

}  // namespace pcdn
