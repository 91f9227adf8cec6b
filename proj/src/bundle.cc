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
#include <cmath>
#include <numeric>

#include "pcdn/error.h"
#include "pcdn/solver.h"

namespace pcdn {

namespace {

// Below these sizes a parallel region costs more than it saves.
constexpr std::size_t kDirectionGrainNnz = 8192;
constexpr std::size_t kRowGrain = 8192;

}  // namespace

void ArmijoParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must be in (0, 1)");
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw ConfigError("sigma must be in (0, 1)");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ConfigError("gamma must be in [0, 1)");
  }
  if (max_steps < 0) throw ConfigError("max line search steps must be >= 0");
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kPcdn:
      return "pcdn";
    case SolverKind::kCdn:
      return "cdn";
    case SolverKind::kScdn:
      return "scdn";
  }
  return "?";
}

std::string_view to_string(StoppingMode mode) {
  return mode == StoppingMode::kSubgradient ? "subgradient" : "gap";
}

SolverKind parse_solver_kind(std::string_view text) {
  if (text == "pcdn") return SolverKind::kPcdn;
  if (text == "cdn") return SolverKind::kCdn;
  if (text == "scdn") return SolverKind::kScdn;
  throw ConfigError("unknown solver '" + std::string(text) +
                    "' (expected pcdn, cdn or scdn)");
}

StoppingMode parse_stopping_mode(std::string_view text) {
  if (text == "subgradient") return StoppingMode::kSubgradient;
  if (text == "gap") return StoppingMode::kReferenceGap;
  throw ConfigError("unknown stopping mode '" + std::string(text) +
                    "' (expected subgradient or gap)");
}

void SolverConfig::validate(std::size_t n_features) const {
  armijo.validate();
  if (solver == SolverKind::kPcdn &&
      (bundle_size < 1 || bundle_size > n_features)) {
    throw ConfigError("P must be in [1, n] (n = " +
                      std::to_string(n_features) + ")");
  }
  if (solver == SolverKind::kScdn && scdn_parallel < 1) {
    throw ConfigError("P-bar must be at least 1");
  }
  if (n_features == 0) throw ConfigError("data has no features");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (refresh_interval < 1) throw ConfigError("refresh interval must be >= 1");
  if (stopping == StoppingMode::kReferenceGap &&
      !(reference_objective && *reference_objective > 0.0)) {
    throw ConfigError("gap stopping requires a positive reference objective");
  }
}

BundleSchedule::BundleSchedule(std::vector<std::size_t> permutation,
                               std::size_t bundle_size)
    : permutation_(std::move(permutation)), bundle_size_(bundle_size) {
  const auto n = permutation_.size();
  if (bundle_size_ < 1 || bundle_size_ > n) {
    throw ConfigError("P must be in [1, n] (n = " + std::to_string(n) + ")");
  }
  count_ = (n + bundle_size_ - 1) / bundle_size_;
}

std::span<const std::size_t> BundleSchedule::bundle(std::size_t b) const {
  if (b >= count_) throw std::out_of_range("bundle index out of range");
  const auto begin = b * bundle_size_;
  const auto end = std::min(begin + bundle_size_, permutation_.size());
  return std::span(permutation_).subspan(begin, end - begin);
}

BundleSchedule partition_features(std::size_t n, std::size_t bundle_size,
                                  std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return BundleSchedule(std::move(perm), bundle_size);
}

BundleSchedule cyclic_partition(std::size_t n, std::size_t bundle_size) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  return BundleSchedule(std::move(perm), bundle_size);
}

double newton_direction_1d(double g, double h, double w) {
  if (!(h > 0.0)) throw ConfigError("Hessian diagonal must be positive");
  if (g + 1.0 <= h * w) return -(g + 1.0) / h;
  if (g - 1.0 >= h * w) return -(g - 1.0) / h;
  return -w;
}

bool DirectionResult::is_zero() const {
  return std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
}

double DirectionResult::curvature() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) sum += hess[k] * d[k] * d[k];
  return sum;
}

BundleStepper::BundleStepper(const LossSpec& spec, const Dataset& data,
                             const ColumnSquaredNorms& norms, WorkerPool& pool)
    : spec_(spec), data_(data), norms_(norms), pool_(pool) {
  const auto s = data.n_samples();
  partials_.resize(pool.size());
  for (auto& p : partials_) {
    p.value.assign(s, 0.0);
    p.mark.assign(s, 0);
  }
  dtx_.assign(s, 0.0);
  row_mark_.assign(s, 0);
}

DirectionResult BundleStepper::compute_direction(
    const ModelState& state, std::span<const std::size_t> bundle,
    const ArmijoParams& armijo) {
  const auto P = bundle.size();
  DirectionResult dir;
  dir.features.assign(bundle.begin(), bundle.end());
  dir.d.assign(P, 0.0);
  dir.grad.assign(P, 0.0);
  dir.hess.assign(P, 0.0);

  std::size_t bundle_nnz = 0;
  for (auto j : bundle) bundle_nnz += data_.matrix.column_unchecked(j).size();
  const std::size_t workers =
      (pool_.size() > 1 && P >= 2 && bundle_nnz >= kDirectionGrainNnz)
          ? std::min(P, pool_.size())
          : 1;

  const auto& matrix = data_.matrix;
  auto body = [&](std::size_t worker) {
    const auto range = block_range(P, workers, worker);
    Partial& part = partials_[worker];
    for (auto pos = range.begin; pos < range.end; ++pos) {
      const auto j = bundle[pos];
      const auto gh = grad_hess_j(spec_, data_, state, j);
      double d = newton_direction_1d(gh.g, gh.h, state.w[j]);
      if (negligible_step(d, state.w[j])) d = 0.0;
      dir.grad[pos] = gh.g;
      dir.hess[pos] = gh.h;
      dir.d[pos] = d;
      if (d == 0.0) continue;
      const auto col = matrix.column_unchecked(j);
      for (std::size_t k = 0; k < col.size(); ++k) {
        const auto row = col.rows[k];
        if (!part.mark[row]) {
          part.mark[row] = 1;
          part.touched.push_back(row);
        }
        part.value[row] += d * col.values[k];
      }
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    pool_.run(workers, body);
  }

  double delta = 0.0;
  double lambda_bar = 0.0;
  for (std::size_t pos = 0; pos < P; ++pos) {
    const double d = dir.d[pos];
    const double wj = state.w[dir.features[pos]];
    delta += dir.grad[pos] * d + armijo.gamma * dir.hess[pos] * d * d +
             abs_change(wj, d);
    lambda_bar = std::max(lambda_bar, norms_.lambda[dir.features[pos]]);
  }
  dir.delta = delta;
  dir.lambda_bar = lambda_bar;

  merge_partials(workers);
  dir.token = next_token_++;
  products_token_ = dir.token;
  return dir;
}

void BundleStepper::accumulate_products(const DirectionResult& dir) {
  Partial& part = partials_[0];
  for (std::size_t pos = 0; pos < dir.features.size(); ++pos) {
    const double d = dir.d[pos];
    if (d == 0.0) continue;
    const auto col = data_.matrix.column_unchecked(dir.features[pos]);
    for (std::size_t k = 0; k < col.size(); ++k) {
      const auto row = col.rows[k];
      if (!part.mark[row]) {
        part.mark[row] = 1;
        part.touched.push_back(row);
      }
      part.value[row] += d * col.values[k];
    }
  }
  merge_partials(1);
  products_token_ = dir.token;
}

void BundleStepper::merge_partials(std::size_t workers) {
  const auto s = data_.n_samples();
  std::size_t total = 0;
  for (std::size_t w = 0; w < workers; ++w) total += partials_[w].touched.size();

  if (workers > 1 && s >= kRowGrain && 2 * total >= s) {
    // Dense merge, parallel over row blocks; summation order is worker order
    // for every row.
    pool_.parallel_for(s, kRowGrain, [&](std::size_t, Range range) {
      for (auto r = range.begin; r < range.end; ++r) {
        double v = 0.0;
        for (std::size_t w = 0; w < workers; ++w) {
          v += partials_[w].value[r];
          partials_[w].value[r] = 0.0;
          partials_[w].mark[r] = 0;
        }
        dtx_[r] = v;
      }
    });
    for (std::size_t w = 0; w < workers; ++w) partials_[w].touched.clear();
    rows_.clear();
    dense_ = true;
    return;
  }

  rows_.clear();
  for (std::size_t w = 0; w < workers; ++w) {
    Partial& part = partials_[w];
    for (auto r : part.touched) {
      if (!row_mark_[r]) {
        row_mark_[r] = 1;
        rows_.push_back(r);
        dtx_[r] = 0.0;
      }
      dtx_[r] += part.value[r];
      part.value[r] = 0.0;
      part.mark[r] = 0;
    }
    part.touched.clear();
  }
  for (auto r : rows_) row_mark_[r] = 0;
  dense_ = false;
}

double BundleStepper::objective_change(const ModelState& state,
                                       const DirectionResult& dir,
                                       double alpha) {
  if (products_token_ != dir.token || dir.token == 0) {
    accumulate_products(dir);
  }
  double l1 = 0.0;
  for (std::size_t pos = 0; pos < dir.features.size(); ++pos) {
    l1 += abs_change(state.w[dir.features[pos]], alpha * dir.d[pos]);
  }

  const auto count = active_row_count();
  const auto workers = pool_.workers_for(count, kRowGrain);
  chunk_sums_.assign(workers, 0.0);
  pool_.parallel_for(count, kRowGrain, [&](std::size_t worker, Range range) {
    double sum = 0.0;
    for (auto k = range.begin; k < range.end; ++k) {
      const auto r = active_row(k);
      const double step = alpha * dtx_[r];
      if (step == 0.0) continue;
      sum += loss_change(spec_, state, r, data_.labels[r], step);
    }
    chunk_sums_[worker] = sum;
  });
  double loss = 0.0;
  for (double v : chunk_sums_) loss += v;
  return l1 + loss;
}

LineSearchResult BundleStepper::line_search(ModelState& state,
                                            const DirectionResult& dir,
                                            const ArmijoParams& armijo) {
  if (dir.is_zero()) return {0.0, 0, 0.0};

  double alpha = 1.0;
  for (int q = 0; q <= armijo.max_steps; ++q) {
    const double change = objective_change(state, dir, alpha);
    if (change <= armijo.sigma * alpha * dir.delta) {
      for (std::size_t pos = 0; pos < dir.features.size(); ++pos) {
        state.w[dir.features[pos]] += alpha * dir.d[pos];
      }
      const bool logistic = spec_.kind == LossKind::kLogistic;
      const auto count = active_row_count();
      const auto workers = pool_.workers_for(count, kRowGrain);
      std::vector<std::uint8_t> ok(workers, 1);
      pool_.parallel_for(count, kRowGrain,
                         [&](std::size_t worker, Range range) {
                           bool good = true;
                           for (auto k = range.begin; k < range.end; ++k) {
                             const auto r = active_row(k);
                             const double step = alpha * dtx_[r];
                             if (step == 0.0) continue;
                             good &= apply_margin_delta(
                                 state, r, step, logistic ? std::exp(step) : 1.0);
                           }
                           ok[worker] = good;
                         });
      if (std::find(ok.begin(), ok.end(), 0) != ok.end()) {
        throw NumericError("sample cache overflowed during update");
      }
      state.objective.add(change);
      return {alpha, q, change};
    }
    alpha *= armijo.beta;
  }
  throw LineSearchError(dir.delta, dir.lambda_bar, dir.features.size(),
                        armijo.max_steps);
}

DirectionResult compute_bundle_direction(const LossSpec& spec,
                                         const Dataset& data,
                                         const ModelState& state,
                                         std::span<const std::size_t> bundle,
                                         const ArmijoParams& armijo) {
  WorkerPool pool(1);
  const auto norms = column_squared_norms(data.matrix);
  BundleStepper stepper(spec, data, norms, pool);
  auto dir = stepper.compute_direction(state, bundle, armijo);
  dir.token = 0;  // products are not carried across steppers
  return dir;
}

LineSearchResult line_search_bundle(const LossSpec& spec, const Dataset& data,
                                    ModelState& state,
                                    const DirectionResult& dir,
                                    const ArmijoParams& armijo) {
  WorkerPool pool(1);
  const ColumnSquaredNorms norms;  // unused by the line search
  BundleStepper stepper(spec, data, norms, pool);
  return stepper.line_search(state, dir, armijo);
}

}  // namespace pcdn
