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

#include "pcdn/bench.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "pcdn/error.h"
#include "pcdn/theory.h"

namespace pcdn {

ReferenceBudgetError::ReferenceBudgetError(ReferenceSolution best)
    : std::runtime_error("reference solve exhausted its budget at F = " +
                         std::to_string(best.objective)),
      best_(std::move(best)) {}

ReferenceSolution reference_solve(const LossSpec& spec, const Dataset& data,
                                  const ReferenceOptions& options) {
  SolverConfig config;
  config.solver = SolverKind::kCdn;
  config.bundle_size = 1;
  config.threads = options.threads;
  config.seed = options.seed;
  config.epsilon = options.epsilon;
  config.max_outer_iters = options.max_outer_iters;
  config.stopping = StoppingMode::kSubgradient;
  auto run = cdn_solve(spec, data, config);
  run.traces.clear();  // only the optimum matters; traces can be huge
  run.traces.shrink_to_fit();
  ReferenceSolution solution{run.w, run.objective, std::move(run)};
  if (solution.run.status != SolveStatus::kConverged) {
    throw ReferenceBudgetError(std::move(solution));
  }
  return solution;
}

double relative_gap_raw(double objective, double reference) {
  if (!(reference > 0.0)) {
    throw ConfigError("relative gap needs a positive reference objective");
  }
  return (objective - reference) / reference;
}

double relative_gap(double objective, double reference) {
  return std::max(0.0, relative_gap_raw(objective, reference));
}

std::vector<std::int8_t> predict(std::span<const double> w,
                                 const Dataset& data) {
  std::vector<double> score(data.n_samples(), 0.0);
  const auto n = std::min(w.size(), data.n_features());
  for (std::size_t j = 0; j < n; ++j) {
    if (w[j] == 0.0) continue;
    const auto col = data.matrix.column_unchecked(j);
    for (std::size_t k = 0; k < col.size(); ++k) {
      score[col.rows[k]] += w[j] * col.values[k];
    }
  }
  std::vector<std::int8_t> labels(score.size());
  for (std::size_t i = 0; i < score.size(); ++i) {
    labels[i] = score[i] >= 0.0 ? 1 : -1;
  }
  return labels;
}

double accuracy(std::span<const double> w, const Dataset& test) {
  if (test.n_samples() == 0) return 0.0;
  const auto labels = predict(w, test);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    hits += labels[i] == test.labels[i];
  }
  return double(hits) / double(labels.size());
}

RunRecord make_run_record(const LossSpec& spec, const SolverConfig& config,
                          const SolveResult& result,
                          std::optional<double> reference_objective,
                          const Dataset* test) {
  RunRecord record;
  record.spec = spec;
  record.config = config;
  record.trace = result.traces;
  record.status = result.status;
  record.objective = result.objective;
  record.nnz = count_nonzeros(result.w);
  for (double v : result.w) record.l1_norm += std::abs(v);
  if (test != nullptr) record.test_accuracy = accuracy(result.w, *test);
  record.reference_objective = reference_objective;
  if (reference_objective) {
    for (double f : result.outer_objectives) {
      const double raw = relative_gap_raw(f, *reference_objective);
      record.gap_raw.push_back(raw);
      record.gap.push_back(std::max(0.0, raw));
    }
  }
  record.stats = result.stats;
  return record;
}

std::int64_t iterations_to_gap(std::span<const IterationTrace> trace,
                               double reference, double epsilon) {
  for (const auto& row : trace) {
    if (relative_gap_raw(row.objective, reference) <= epsilon) {
      return static_cast<std::int64_t>(row.t) + 1;
    }
  }
  return -1;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const auto mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

SweepTable sweep_P(const LossSpec& spec, const Dataset& data,
                   double reference, const SweepOptions& options) {
  if (options.P_list.empty() || options.seeds.empty()) {
    throw ConfigError("sweep needs at least one P and one seed");
  }
  if (!(reference > 0.0)) {
    throw ConfigError("sweep needs a positive reference objective");
  }
  const auto spectrum =
      LambdaSpectrum::from_norms(column_squared_norms(data.matrix));
  SweepTable table;
  table.reference_objective = reference;
  for (auto P : options.P_list) {
    SolverConfig config;
    config.solver = SolverKind::kPcdn;
    config.bundle_size = P;
    config.threads = options.threads;
    config.epsilon = options.epsilon;
    config.max_outer_iters = options.max_outer_iters;
    config.armijo = options.armijo;
    config.stopping = StoppingMode::kReferenceGap;
    config.reference_objective = reference;
    config.validate(data.n_features());

    const double expected = expected_max_lambda(spectrum, P);
    SweepSummary summary;
    summary.P = P;
    summary.all_converged = true;
    summary.E_lambda_bar = expected;
    summary.E_lambda_bar_over_P = expected / double(P);
    summary.min_hessian = std::numeric_limits<double>::infinity();
    std::vector<double> converged_t;
    std::vector<double> walls;
    double q_sum = 0.0;
    for (auto seed : options.seeds) {
      config.seed = seed;
      const auto result = pcdn_solve(spec, data, config);
      SweepRow row;
      row.P = P;
      row.seed = seed;
      row.T_eps = iterations_to_gap(result.traces, reference, options.epsilon);
      row.wall_ms = result.traces.empty() ? 0.0 : result.traces.back().wall_ms;
      row.mean_q = result.stats.mean_q();
      row.E_lambda_bar = expected;
      row.E_lambda_bar_over_P = expected / double(P);
      row.min_hessian = result.stats.min_hessian;
      row.inf_alpha = result.stats.inf_alpha;
      row.sup_alpha = result.stats.sup_alpha;
      table.rows.push_back(row);

      if (row.T_eps < 0) {
        summary.all_converged = false;
      } else {
        converged_t.push_back(double(row.T_eps));
      }
      walls.push_back(row.wall_ms);
      q_sum += row.mean_q;
      summary.min_hessian = std::min(summary.min_hessian, row.min_hessian);
    }
    summary.median_T_eps = median(converged_t);
    summary.median_wall_ms = median(walls);
    summary.mean_q = q_sum / double(options.seeds.size());
    table.summary.push_back(summary);
  }
  return table;
}

namespace {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_real(std::string_view text, std::size_t line) {
  const std::string copy(text);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw ParseError(line, "bad number '" + copy + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view text, std::size_t line) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "bad integer '" + std::string(text) + "'");
  }
  return v;
}

// Reads the header and every data row, each already split on commas.
std::vector<std::vector<std::string_view>> read_rows(
    std::istream& in, const char* header, std::vector<std::string>& storage) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ParseError(1, "unexpected CSV header '" + line + "'");
  const auto columns = split_fields(header).size();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    storage.push_back(line);
  }
  std::vector<std::vector<std::string_view>> rows;
  for (std::size_t r = 0; r < storage.size(); ++r) {
    auto fields = split_fields(storage[r]);
    if (fields.size() != columns) {
      throw ParseError(r + 2, "expected " + std::to_string(columns) +
                                  " fields, got " +
                                  std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

void write_trace_csv(std::ostream& out, std::span<const IterationTrace> trace,
                     const TraceCsvOptions& options) {
  out << kTraceCsvHeader << '\n';
  for (const auto& r : trace) {
    const double wall = options.include_timings ? r.wall_ms : 0.0;
    const double dc = options.include_timings ? r.t_dc_ms : 0.0;
    const double ls = options.include_timings ? r.t_ls_ms : 0.0;
    out << r.t << ',' << r.k << ',' << format_real(wall) << ','
        << format_real(r.objective) << ',' << format_real(r.rel_gap) << ','
        << r.nnz << ',' << format_real(r.alpha) << ',' << r.q << ','
        << format_real(r.lambda_bar) << ',' << format_real(dc) << ','
        << format_real(ls) << '\n';
  }
}

std::vector<IterationTrace> read_trace_csv(std::istream& in) {
  std::vector<std::string> storage;
  const auto rows = read_rows(in, kTraceCsvHeader, storage);
  std::vector<IterationTrace> trace;
  trace.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = rows[r];
    const auto line = r + 2;
    IterationTrace t;
    t.t = parse_int<std::size_t>(f[0], line);
    t.k = parse_int<std::size_t>(f[1], line);
    t.wall_ms = parse_real(f[2], line);
    t.objective = parse_real(f[3], line);
    t.rel_gap = parse_real(f[4], line);
    t.nnz = parse_int<std::size_t>(f[5], line);
    t.alpha = parse_real(f[6], line);
    t.q = parse_int<int>(f[7], line);
    t.lambda_bar = parse_real(f[8], line);
    t.t_dc_ms = parse_real(f[9], line);
    t.t_ls_ms = parse_real(f[10], line);
    trace.push_back(t);
  }
  return trace;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.P << ',' << r.seed << ',' << r.T_eps << ','
        << format_real(r.wall_ms) << ',' << format_real(r.mean_q) << ','
        << format_real(r.E_lambda_bar) << ','
        << format_real(r.E_lambda_bar_over_P) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::vector<std::string> storage;
  const auto rows = read_rows(in, kSweepCsvHeader, storage);
  std::vector<SweepRow> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = rows[r];
    const auto line = r + 2;
    SweepRow row;
    row.P = parse_int<std::size_t>(f[0], line);
    row.seed = parse_int<std::uint64_t>(f[1], line);
    row.T_eps = parse_int<std::int64_t>(f[2], line);
    row.wall_ms = parse_real(f[3], line);
    row.mean_q = parse_real(f[4], line);
    row.E_lambda_bar = parse_real(f[5], line);
    row.E_lambda_bar_over_P = parse_real(f[6], line);
    out.push_back(row);
  }
  return out;
}

}  // namespace pcdn
