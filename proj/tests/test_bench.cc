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

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.h"
#include "pcdn/bench.h"
#include "pcdn/error.h"
#include "pcdn/synthetic.h"

using namespace pcdn;

TEST_CASE("relative gap") {
  CHECK(relative_gap(5.0, 5.0) == 0.0);
  CHECK(relative_gap(10.0, 5.0) == 1.0);
  CHECK(relative_gap(4.0, 5.0) == 0.0);
  CHECK(relative_gap_raw(4.0, 5.0) == doctest::Approx(-0.2));
  CHECK_THROWS_AS(relative_gap(1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(relative_gap(1.0, -2.0), ConfigError);
}

TEST_CASE("accuracy conventions") {
  const auto d = oracle::from_dense({{1, 0}, {0, 1}, {1, 1}, {-1, 0}},
                                    {1, -1, -1, -1});
  CHECK(accuracy(std::vector<double>{0, 0}, d) == 0.25);  // all predicted +1
  CHECK(accuracy(std::vector<double>{1, -1}, d) == 0.75);  // row 2 scores 0
  CHECK(accuracy(std::vector<double>{1, -2}, d) == 1.0);
  // Shorter and longer weight vectors are tolerated.
  CHECK(accuracy(std::vector<double>{1}, d) == 0.5);
  CHECK(accuracy(std::vector<double>{1, -2, 5, 5}, d) == 1.0);
}

TEST_CASE("reference solve") {
  std::mt19937_64 rng(1);
  const auto d = oracle::random_dataset(60, 10, 0.4, rng);
  const auto spec = LossSpec::logistic(1.0);
  ReferenceOptions a;
  a.seed = 1;
  ReferenceOptions b;
  b.seed = 2;
  const auto ra = reference_solve(spec, d, a);
  const auto rb = reference_solve(spec, d, b);
  CHECK(std::abs(ra.objective - rb.objective) <= 1e-7 * ra.objective);
  CHECK(ra.objective <= objective(spec, d, std::vector<double>(10, 0.0)));

  ReferenceOptions tight;
  tight.max_outer_iters = 1;
  try {
    reference_solve(spec, d, tight);
    FAIL("expected a budget error");
  } catch (const ReferenceBudgetError& e) {
    CHECK(e.best().w.size() == 10);
    CHECK(e.best().objective < 60 * std::log(2.0));
  }
}

TEST_CASE("one-feature reference equals golden section") {
  std::mt19937_64 rng(2);
  const auto d = oracle::random_dataset(30, 1, 0.8, rng);
  const auto x = oracle::to_dense(d.matrix);
  for (auto kind : {LossKind::kLogistic, LossKind::kSquaredHinge}) {
    const auto spec = LossSpec::make(kind, 3.0);
    auto f = [&](double w) {
      return oracle::objective(kind, 3.0, x, d.labels, {w});
    };
    const double w = oracle::golden_section(f, -50, 50, 1e-14);
    const auto ref = reference_solve(spec, d);
    CHECK(ref.w[0] == doctest::Approx(w).epsilon(1e-6));
    CHECK(ref.objective == doctest::Approx(f(w)).epsilon(1e-8));
  }
}

TEST_CASE("iterations to gap and median") {
  std::vector<IterationTrace> t(4);
  const double objs[] = {10, 5, 3, 2};
  for (std::size_t i = 0; i < 4; ++i) {
    t[i].t = i;
    t[i].objective = objs[i];
  }
  CHECK(iterations_to_gap(t, 2.0, 0.5) == 3);  // 3 / 2 - 1 = 0.5 at t = 2
  CHECK(iterations_to_gap(t, 2.0, 0.0) == 4);
  CHECK(iterations_to_gap(t, 1.0, 0.1) == -1);
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("trace CSV round trip") {
  std::vector<IterationTrace> t(3);
  for (std::size_t i = 0; i < 3; ++i) {
    t[i].t = i;
    t[i].k = i / 2;
    t[i].wall_ms = 0.1 * double(i) + 1e-17;
    t[i].objective = std::exp(1.0) * double(i + 1);
    t[i].rel_gap = i == 0 ? NAN : 1.0 / 3.0;
    t[i].nnz = 7 * i;
    t[i].alpha = std::ldexp(1.0, -int(i));
    t[i].q = int(i);
    t[i].lambda_bar = 4.9e-324;
    t[i].t_dc_ms = 1e300;
    t[i].t_ls_ms = 0.0;
  }
  std::stringstream s;
  write_trace_csv(s, t);
  CHECK(s.str().rfind(kTraceCsvHeader, 0) == 0);
  const auto back = read_trace_csv(s);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].t == t[i].t);
    CHECK(back[i].k == t[i].k);
    CHECK(back[i].wall_ms == t[i].wall_ms);
    CHECK(back[i].objective == t[i].objective);
    CHECK((std::isnan(back[i].rel_gap) ? std::isnan(t[i].rel_gap)
                                       : back[i].rel_gap == t[i].rel_gap));
    CHECK(back[i].nnz == t[i].nnz);
    CHECK(back[i].alpha == t[i].alpha);
    CHECK(back[i].q == t[i].q);
    CHECK(back[i].lambda_bar == t[i].lambda_bar);
    CHECK(back[i].t_dc_ms == t[i].t_dc_ms);
  }
  std::stringstream again;
  write_trace_csv(again, back);
  CHECK(again.str() == s.str());

  std::stringstream zeroed;
  write_trace_csv(zeroed, t, {false});
  const auto z = read_trace_csv(zeroed);
  CHECK(z[1].wall_ms == 0.0);
  CHECK(z[1].t_dc_ms == 0.0);
  CHECK(z[1].objective == t[1].objective);

  std::stringstream bad("t,k\n1,2\n");
  CHECK_THROWS_AS(read_trace_csv(bad), ParseError);
  std::stringstream short_row(std::string(kTraceCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_trace_csv(short_row), ParseError);
}

TEST_CASE("sweep CSV round trip") {
  std::vector<SweepRow> rows(2);
  rows[0] = {1, 3, 120, 1.5, 0.25, 2.0 / 3.0, 2.0 / 3.0};
  rows[1] = {8, 3, -1, 0.7, 1.0, 1.0, 0.125};
  std::stringstream s;
  write_sweep_csv(s, rows);
  const auto back = read_sweep_csv(s);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].P == rows[i].P);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(back[i].T_eps == rows[i].T_eps);
    CHECK(back[i].wall_ms == rows[i].wall_ms);
    CHECK(back[i].mean_q == rows[i].mean_q);
    CHECK(back[i].E_lambda_bar == rows[i].E_lambda_bar);
    CHECK(back[i].E_lambda_bar_over_P == rows[i].E_lambda_bar_over_P);
  }
}

TEST_CASE("sweep on equal-norm columns") {
  SyntheticOptions opt;
  opt.samples = 600;
  opt.features = 64;
  opt.density = 0.05;
  opt.equal_column_norms = true;
  opt.seed = 4;
  const auto d = make_synthetic(opt);
  const auto spec = LossSpec::logistic(1.0);
  const auto ref = reference_solve(spec, d);
  SweepOptions so;
  so.P_list = {1, 4, 16};
  so.seeds = {1, 2, 3};
  so.epsilon = 1e-3;
  const auto table = sweep_P(spec, d, ref.objective, so);
  CHECK(table.rows.size() == 9);
  REQUIRE(table.summary.size() == 3);
  for (const auto& s : table.summary) {
    CHECK(s.all_converged);
    CHECK(s.E_lambda_bar == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Near-linear speedup regime: T_eps * P stays within a small factor.
  const double base = table.summary[0].median_T_eps;
  for (const auto& s : table.summary) {
    CHECK(s.median_T_eps * double(s.P) <= 2.0 * base);
    CHECK(s.median_T_eps * double(s.P) >= 0.5 * base);
  }
  const auto again = sweep_P(spec, d, ref.objective, so);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    CHECK(again.rows[i].T_eps == table.rows[i].T_eps);
  }
  for (std::size_t i = 1; i < table.summary.size(); ++i) {
    CHECK(table.summary[i].E_lambda_bar_over_P <=
          table.summary[i - 1].E_lambda_bar_over_P);
  }
}

TEST_CASE("run record") {
  SyntheticOptions opt;
  opt.samples = 200;
  opt.features = 8;
  opt.density = 0.5;
  opt.truth_density = 0.5;
  const auto d = make_synthetic(opt);
  const auto spec = LossSpec::logistic(1.0);
  const auto ref = reference_solve(spec, d);
  SolverConfig config;
  config.bundle_size = 4;
  config.reference_objective = ref.objective;
  const auto r = pcdn_solve(spec, d, config);
  const auto rec = make_run_record(spec, config, r, ref.objective, &d);
  CHECK(rec.gap.size() == r.outer_objectives.size());
  for (std::size_t i = 1; i < rec.gap.size(); ++i) {
    CHECK(rec.gap[i] <= rec.gap[i - 1] + 1e-12);
    CHECK(rec.gap[i] >= 0.0);
  }
  CHECK(rec.test_accuracy.has_value());
  CHECK(*rec.test_accuracy >= accuracy(std::vector<double>(8, 0.0), d));
  double wall = 0;
  for (const auto& t : rec.trace) {
    CHECK(t.wall_ms >= wall);
    wall = t.wall_ms;
  }
}
