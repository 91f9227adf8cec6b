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

#ifndef PCDN_BENCH_H_
#define PCDN_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pcdn/loss.h"
#include "pcdn/solver.h"
#include "pcdn/sparse_data.h"

namespace pcdn {

struct ReferenceOptions {
  double epsilon = 1e-8;  // subgradient tolerance, relative to w = 0
  std::size_t max_outer_iters = 200000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct ReferenceSolution {
  std::vector<double> w;
  double objective = 0.0;
  SolveResult run;
};

// Raised when the reference solve runs out of budget; carries the best
// point reached so callers may still use it.
class ReferenceBudgetError : public std::runtime_error {
 public:
  explicit ReferenceBudgetError(ReferenceSolution best);
  const ReferenceSolution& best() const { return best_; }

 private:
  ReferenceSolution best_;
};

// Tight CDN solve used as F* in the relative gap.
ReferenceSolution reference_solve(const LossSpec& spec, const Dataset& data,
                                  const ReferenceOptions& options = {});

// (F - F*) / F*. Throws ConfigError when F* <= 0. The clamped form never
// goes below zero (reference imprecision).
double relative_gap_raw(double objective, double reference);
double relative_gap(double objective, double reference);

// Fraction of samples with sign(w^T x) == y, where sign(0) is +1. Weights
// beyond w.size() count as zero; weights for features the data lacks are
// ignored.
double accuracy(std::span<const double> w, const Dataset& test);
std::vector<std::int8_t> predict(std::span<const double> w,
                                 const Dataset& data);

struct RunRecord {
  LossSpec spec;
  SolverConfig config;
  std::vector<IterationTrace> trace;
  SolveStatus status = SolveStatus::kBudgetExhausted;
  double objective = 0.0;
  std::size_t nnz = 0;
  double l1_norm = 0.0;
  std::optional<double> test_accuracy;
  std::optional<double> reference_objective;
  // One entry per outer boundary (starting at w = 0), when F* is known.
  std::vector<double> gap_raw;
  std::vector<double> gap;
  RunStats stats;
};

RunRecord make_run_record(const LossSpec& spec, const SolverConfig& config,
                          const SolveResult& result,
                          std::optional<double> reference_objective,
                          const Dataset* test = nullptr);

// One solve of the P-sweep.
struct SweepRow {
  std::size_t P = 0;
  std::uint64_t seed = 0;
  std::int64_t T_eps = -1;  // inner iterations to gap <= eps; -1 if never
  double wall_ms = 0.0;
  double mean_q = 0.0;
  double E_lambda_bar = 0.0;
  double E_lambda_bar_over_P = 0.0;
  // Not part of the CSV schema.
  double min_hessian = 0.0;
  double inf_alpha = 0.0;
  double sup_alpha = 0.0;
};

// Per-P aggregate over seeds.
struct SweepSummary {
  std::size_t P = 0;
  double median_T_eps = 0.0;  // over converged seeds
  bool all_converged = false;
  double median_wall_ms = 0.0;
  double mean_q = 0.0;  // mean over seeds
  double E_lambda_bar = 0.0;
  double E_lambda_bar_over_P = 0.0;
  double min_hessian = 0.0;  // smallest over seeds
};

struct SweepOptions {
  std::vector<std::size_t> P_list;
  std::vector<std::uint64_t> seeds;
  double epsilon = 1e-3;  // relative-gap target
  std::size_t threads = 1;
  std::size_t max_outer_iters = 1000;
  ArmijoParams armijo;
};

struct SweepTable {
  double reference_objective = 0.0;
  std::vector<SweepRow> rows;         // P-major, seeds in the given order
  std::vector<SweepSummary> summary;  // in P_list order
};

// Runs PCDN for every (P, seed) until the relative gap to `reference` drops
// to epsilon or the budget runs out. A cell that never converges is flagged
// with T_eps = -1 and does not abort the sweep.
SweepTable sweep_P(const LossSpec& spec, const Dataset& data,
                   double reference, const SweepOptions& options);

// Inner iterations until the gap first reaches epsilon, -1 if never.
std::int64_t iterations_to_gap(std::span<const IterationTrace> trace,
                               double reference, double epsilon);

double median(std::vector<double> values);

// CSV I/O. Numbers use 17 significant digits so rows round-trip exactly.
struct TraceCsvOptions {
  bool include_timings = true;  // false writes 0 for timing columns
};

void write_trace_csv(std::ostream& out, std::span<const IterationTrace> trace,
                     const TraceCsvOptions& options = {});
std::vector<IterationTrace> read_trace_csv(std::istream& in);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

inline constexpr const char* kTraceCsvHeader =
    "t,k,wall_ms,objective,rel_gap,nnz,alpha,q,lambda_bar,t_dc_ms,t_ls_ms";
inline constexpr const char* kSweepCsvHeader =
    "P,seed,T_eps,wall_ms,mean_q,E_lambda_bar,E_lambda_bar_over_P";

}  // namespace pcdn

#endif  // PCDN_BENCH_H_
