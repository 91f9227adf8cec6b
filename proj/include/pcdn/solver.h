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

#ifndef PCDN_SOLVER_H_
#define PCDN_SOLVER_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "pcdn/loss.h"
#include "pcdn/sparse_data.h"
#include "pcdn/worker_pool.h"

namespace pcdn {

// Armijo rule: accept alpha = beta^q for the smallest q with
//   F(w + alpha d) - F(w) <= sigma * alpha * Delta,
//   Delta = grad^T d + gamma d^T H d + ||w + d||_1 - ||w||_1.
struct ArmijoParams {
  double beta = 0.5;
  double sigma = 0.01;
  double gamma = 0.0;
  int max_steps = 50;  // q ranges over 0..max_steps

  void validate() const;
};

enum class SolverKind { kPcdn, kCdn, kScdn };
enum class StoppingMode { kSubgradient, kReferenceGap };

std::string_view to_string(SolverKind kind);
std::string_view to_string(StoppingMode mode);
SolverKind parse_solver_kind(std::string_view text);
StoppingMode parse_stopping_mode(std::string_view text);  // subgradient|gap

struct SolverConfig {
  SolverKind solver = SolverKind::kPcdn;
  std::size_t bundle_size = 1;    // P, PCDN only
  std::size_t scdn_parallel = 8;  // P-bar, SCDN only
  std::size_t threads = 1;
  std::uint64_t seed = 1;
  double epsilon = 1e-3;
  std::size_t max_outer_iters = 1000;
  ArmijoParams armijo;
  StoppingMode stopping = StoppingMode::kSubgradient;
  std::optional<double> reference_objective;  // F(w*) for kReferenceGap
  // Visit features in index order instead of a fresh permutation per pass.
  bool cyclic_order = false;
  // Outer iterations between full cache rebuilds.
  std::size_t refresh_interval = 50;
  // SCDN aborts when F exceeds this multiple of F(0).
  double divergence_factor = 10.0;

  void validate(std::size_t n_features) const;  // throws ConfigError
};

// A permutation of the features cut into ceil(n / P) contiguous bundles;
// all bundles have P features except possibly the last.
class BundleSchedule {
 public:
  BundleSchedule(std::vector<std::size_t> permutation, std::size_t bundle_size);

  std::size_t bundle_size() const { return bundle_size_; }
  std::size_t bundle_count() const { return count_; }
  std::span<const std::size_t> permutation() const { return permutation_; }
  std::span<const std::size_t> bundle(std::size_t b) const;

 private:
  std::vector<std::size_t> permutation_;
  std::size_t bundle_size_;
  std::size_t count_;
};

// Uniformly random partition, reproducible from the engine state.
BundleSchedule partition_features(std::size_t n, std::size_t bundle_size,
                                  std::mt19937_64& rng);
// Features in index order.
BundleSchedule cyclic_partition(std::size_t n, std::size_t bundle_size);

// Exact minimizer over d of g d + h d^2 / 2 + |w + d|. Requires h > 0.
double newton_direction_1d(double g, double h, double w);

// Steps this small relative to the weight cannot be resolved by the
// descent test (the cached loss change is pure rounding noise there), so
// the solvers treat them as zero.
inline constexpr double kNegligibleStep = 1e-14;
inline bool negligible_step(double d, double w) {
  return std::abs(d) <= kNegligibleStep * std::max(1.0, std::abs(w));
}

struct DirectionResult {
  std::vector<std::size_t> features;  // the bundle
  std::vector<double> d;              // d[k] belongs to features[k]
  std::vector<double> grad;
  std::vector<double> hess;
  double delta = 0.0;
  double lambda_bar = 0.0;  // max column squared norm within the bundle
  std::uint64_t token = 0;  // ties the direction to its cached d^T x

  bool is_zero() const;
  double curvature() const;  // sum_k hess[k] d[k]^2
};

struct LineSearchResult {
  double alpha = 0.0;
  int steps = 0;                  // q of the accepted step
  double objective_change = 0.0;  // F(w + alpha d) - F(w), cached form
};

// Executes the two phases of one inner iteration on a shared worker pool:
// a parallel read-only phase computing per-feature directions together with
// per-worker partial d^T x_i accumulators, and, after the barrier, the
// backtracking loop that owns the state exclusively. Per-worker partials are
// merged in worker order so results are reproducible for a fixed pool size.
class BundleStepper {
 public:
  BundleStepper(const LossSpec& spec, const Dataset& data,
                const ColumnSquaredNorms& norms, WorkerPool& pool);

  DirectionResult compute_direction(const ModelState& state,
                                    std::span<const std::size_t> bundle,
                                    const ArmijoParams& armijo);

  // On success updates w, the sample cache and the stored objective.
  // Throws LineSearchError when no q <= armijo.max_steps is accepted.
  LineSearchResult line_search(ModelState& state, const DirectionResult& dir,
                               const ArmijoParams& armijo);

  // Descent-condition left-hand side at step size alpha (no state change).
  double objective_change(const ModelState& state, const DirectionResult& dir,
                          double alpha);

 private:
  void accumulate_products(const DirectionResult& dir);
  void merge_partials(std::size_t workers);
  std::size_t active_row_count() const {
    return dense_ ? data_.n_samples() : rows_.size();
  }
  std::size_t active_row(std::size_t k) const {
    return dense_ ? k : rows_[k];
  }

  const LossSpec& spec_;
  const Dataset& data_;
  const ColumnSquaredNorms& norms_;
  WorkerPool& pool_;

  struct Partial {
    std::vector<double> value;
    std::vector<std::uint8_t> mark;
    std::vector<std::uint32_t> touched;
  };
  std::vector<Partial> partials_;
  std::vector<double> dtx_;               // merged d^T x_i
  std::vector<std::uint8_t> row_mark_;
  std::vector<std::uint32_t> rows_;       // rows with nonzero d^T x_i
  bool dense_ = false;                    // all rows active
  std::uint64_t products_token_ = 0;      // direction dtx_ belongs to
  std::uint64_t next_token_ = 1;
  std::vector<double> chunk_sums_;
};

// Convenience single-threaded forms of the two phases.
DirectionResult compute_bundle_direction(const LossSpec& spec,
                                         const Dataset& data,
                                         const ModelState& state,
                                         std::span<const std::size_t> bundle,
                                         const ArmijoParams& armijo);
LineSearchResult line_search_bundle(const LossSpec& spec, const Dataset& data,
                                    ModelState& state,
                                    const DirectionResult& dir,
                                    const ArmijoParams& armijo);

// One record per inner iteration (per epoch for SCDN).
struct IterationTrace {
  std::size_t t = 0;  // cumulative inner iteration
  std::size_t k = 0;  // outer iteration
  double wall_ms = 0.0;
  double objective = 0.0;
  double rel_gap = 0.0;  // NaN without a reference objective
  std::size_t nnz = 0;
  double alpha = 0.0;
  int q = 0;
  double lambda_bar = 0.0;
  double t_dc_ms = 0.0;
  double t_ls_ms = 0.0;
};

struct RunStats {
  double initial_objective = 0.0;     // F(0)
  double initial_subgradient = 0.0;   // ||min-norm subgradient at 0||_1
  double final_subgradient = 0.0;
  double min_hessian = 0.0;           // smallest h_j seen in any direction
  double max_hessian = 0.0;
  double inf_alpha = 0.0;             // over accepted nonzero steps
  double sup_alpha = 0.0;
  std::size_t line_search_steps = 0;  // sum of q
  std::size_t line_searches = 0;
  std::size_t failed_line_searches = 0;  // SCDN only
  double mean_q() const {
    return line_searches == 0
               ? 0.0
               : double(line_search_steps) / double(line_searches);
  }
};

enum class SolveStatus { kConverged, kBudgetExhausted };

struct SolveResult {
  std::vector<double> w;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kBudgetExhausted;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  std::vector<IterationTrace> traces;
  std::vector<double> outer_objectives;  // F at each outer boundary, from 0
  RunStats stats;
};

// Outer-boundary stopping test.
class StoppingRule {
 public:
  // Throws ConfigError in gap mode without a positive reference objective.
  StoppingRule(const LossSpec& spec, const Dataset& data,
               const SolverConfig& config, const ModelState& initial);

  bool satisfied(const ModelState& state);
  double initial_subgradient() const { return initial_subgradient_; }
  double last_subgradient() const { return last_subgradient_; }

 private:
  const LossSpec& spec_;
  const Dataset& data_;
  StoppingMode mode_;
  double epsilon_;
  std::optional<double> reference_;
  double initial_subgradient_ = 0.0;
  double last_subgradient_ = 0.0;
};

// Subgradient mode: ||g(w)||_1 <= eps * ||g(0)||_1 (min-norm subgradient).
// Gap mode: (F(w) - F*) / F* <= eps.
bool check_stop(const LossSpec& spec, const Dataset& data,
                const ModelState& state, const SolverConfig& config,
                std::optional<double> reference_objective);

SolveResult pcdn_solve(const LossSpec& spec, const Dataset& data,
                       const SolverConfig& config);
// PCDN with P = 1.
SolveResult cdn_solve(const LossSpec& spec, const Dataset& data,
                      const SolverConfig& config);
// Shotgun CDN; throws DivergenceError when the objective blows up.
SolveResult scdn_solve(const LossSpec& spec, const Dataset& data,
                       const SolverConfig& config);
// Dispatches on config.solver.
SolveResult solve(const LossSpec& spec, const Dataset& data,
                  const SolverConfig& config);

std::size_t count_nonzeros(std::span<const double> w);

}  // namespace pcdn

#endif  // PCDN_SOLVER_H_
