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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "pcdn/error.h"
#include "pcdn/rng.h"
#include "pcdn/solver.h"

namespace pcdn {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since)
      .count();
}

struct SlotUpdate {
  std::size_t feature = 0;
  double step = 0.0;  // alpha * d, zero when skipped
  double alpha = 0.0;
  double hess = 0.0;
  int q = 0;
  bool failed = false;
};

// One shotgun update: direction and 1-D Armijo search for feature j against
// the state as it was when the round started.
SlotUpdate propose(const LossSpec& spec, const Dataset& data,
                   const ModelState& state, std::size_t j,
                   const ArmijoParams& armijo) {
  SlotUpdate u;
  u.feature = j;
  const auto gh = grad_hess_j(spec, data, state, j);
  u.hess = gh.h;
  const double wj = state.w[j];
  const double d = newton_direction_1d(gh.g, gh.h, wj);
  if (d == 0.0 || negligible_step(d, wj)) return u;
  const double delta =
      gh.g * d + armijo.gamma * gh.h * d * d + abs_change(wj, d);
  const auto col = data.matrix.column_unchecked(j);
  double alpha = 1.0;
  for (int q = 0; q <= armijo.max_steps; ++q) {
    double change = abs_change(wj, alpha * d);
    for (std::size_t k = 0; k < col.size(); ++k) {
      const auto r = col.rows[k];
      change += loss_change(spec, state, r, data.labels[r],
                            alpha * d * col.values[k]);
    }
    if (change <= armijo.sigma * alpha * delta) {
      u.step = alpha * d;
      u.alpha = alpha;
      u.q = q;
      return u;
    }
    alpha *= armijo.beta;
  }
  u.failed = true;
  return u;
}

}  // namespace

// Each round draws P-bar features uniformly at random (one RNG stream per
// slot), proposes all of them in parallel from the same stale snapshot, then
// applies the proposals in slot order. An epoch is ceil(n / P-bar) rounds,
// i.e. about n coordinate updates; the cache is rebuilt, divergence checked
// and the stopping rule evaluated at epoch boundaries. One trace record per
// epoch: alpha is the mean accepted step, q the summed backtracking steps.
SolveResult scdn_solve(const LossSpec& spec, const Dataset& data,
                       const SolverConfig& config) {
  spec.validate();
  SolverConfig checked = config;
  checked.solver = SolverKind::kScdn;
  checked.validate(data.n_features());
  const auto start = Clock::now();
  const auto n = data.n_features();
  const auto slots = config.scdn_parallel;
  const auto workers = std::min(slots, config.threads);
  const auto rounds_per_epoch = (n + slots - 1) / slots;

  WorkerPool pool(workers);
  const auto norms = column_squared_norms(data.matrix);
  ModelState state = make_state(spec, data);
  StoppingRule stop(spec, data, checked, state);
  std::vector<std::mt19937_64> engines;
  engines.reserve(slots);
  for (std::size_t p = 0; p < slots; ++p) {
    engines.push_back(make_engine(config.seed, Stream::kScdnSlot, p));
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  SolveResult result;
  RunStats& stats = result.stats;
  stats.initial_objective = state.objective_value();
  stats.initial_subgradient = stop.initial_subgradient();
  stats.min_hessian = std::numeric_limits<double>::infinity();
  stats.inf_alpha = std::numeric_limits<double>::infinity();
  result.outer_objectives.push_back(state.objective_value());
  const double limit = config.divergence_factor * stats.initial_objective;
  const bool logistic = spec.kind == LossKind::kLogistic;

  std::vector<std::size_t> picks(slots);
  std::vector<SlotUpdate> updates(slots);
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
    IterationTrace trace;
    trace.k = k;
    double alpha_sum = 0.0;
    std::size_t accepted = 0;
    for (std::size_t round = 0; round < rounds_per_epoch; ++round, ++t) {
      for (std::size_t p = 0; p < slots; ++p) picks[p] = pick(engines[p]);

      const auto propose_start = Clock::now();
      pool.parallel_for(slots, 2, [&](std::size_t, Range range) {
        for (auto p = range.begin; p < range.end; ++p) {
          updates[p] = propose(spec, data, state, picks[p], config.armijo);
        }
      });
      trace.t_dc_ms += elapsed_ms(propose_start);

      const auto apply_start = Clock::now();
      for (const auto& u : updates) {
        stats.min_hessian = std::min(stats.min_hessian, u.hess);
        stats.max_hessian = std::max(stats.max_hessian, u.hess);
        trace.lambda_bar = std::max(trace.lambda_bar, norms.lambda[u.feature]);
        if (u.failed) ++stats.failed_line_searches;
        if (u.step == 0.0) continue;
        ++stats.line_searches;
        ++accepted;
        stats.line_search_steps += static_cast<std::size_t>(u.q);
        trace.q += u.q;
        alpha_sum += u.alpha;
        stats.inf_alpha = std::min(stats.inf_alpha, u.alpha);
        stats.sup_alpha = std::max(stats.sup_alpha, u.alpha);

        state.w[u.feature] += u.step;
        const auto col = data.matrix.column_unchecked(u.feature);
        for (std::size_t c = 0; c < col.size(); ++c) {
          const double delta = u.step * col.values[c];
          if (!apply_margin_delta(state, col.rows[c], delta,
                                  logistic ? std::exp(delta) : 1.0)) {
            throw DivergenceError("SCDN diverged: sample cache overflowed",
                                  std::numeric_limits<double>::infinity());
          }
        }
      }
      trace.t_ls_ms += elapsed_ms(apply_start);
    }

    double objective_value = std::numeric_limits<double>::infinity();
    try {
      refresh_cache(spec, data, state);
      objective_value = state.objective_value();
    } catch (const NumericError&) {
    }
    if (!std::isfinite(objective_value) || objective_value > limit) {
      throw DivergenceError(
          "SCDN diverged at epoch " + std::to_string(k) + " (objective " +
              std::to_string(objective_value) + ", limit " +
              std::to_string(limit) + ")",
          objective_value);
    }

    trace.t = t - 1;
    trace.objective = objective_value;
    trace.rel_gap =
        config.reference_objective
            ? std::max(0.0, (objective_value - *config.reference_objective) /
                                *config.reference_objective)
            : std::numeric_limits<double>::quiet_NaN();
    trace.nnz = count_nonzeros(state.w);
    trace.alpha = accepted ? alpha_sum / double(accepted) : 0.0;
    trace.wall_ms = elapsed_ms(start);
    result.traces.push_back(trace);
    result.outer_objectives.push_back(objective_value);
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

}  // namespace pcdn
