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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "oracles.h"
#include "pcdn/bench.h"
#include "pcdn/error.h"
#include "pcdn/rng.h"
#include "pcdn/solver.h"
#include "pcdn/synthetic.h"

using namespace pcdn;

TEST_CASE("closed-form direction examples") {
  CHECK(newton_direction_1d(-3, 2, 0) == 1.0);
  CHECK(newton_direction_1d(0.5, 1, 2) == -1.5);
  CHECK(newton_direction_1d(0, 1, 0.5) == -0.5);
  for (auto [g, h, w] : {std::tuple{-3.0, 2.0, 0.0}, {0.5, 1.0, 2.0}}) {
    CHECK(newton_direction_1d(g, h, w) ==
          doctest::Approx(oracle::brute_force_direction(g, h, w)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(newton_direction_1d(1, 0, 0), ConfigError);
  CHECK_THROWS_AS(newton_direction_1d(1, -1, 0), ConfigError);
}

TEST_CASE("negligible steps") {
  CHECK(negligible_step(1e-17, 0.3));
  CHECK(negligible_step(1e-13, 100.0));
  CHECK_FALSE(negligible_step(1e-12, 0.3));
  CHECK_FALSE(negligible_step(0.5, 0.0));
}

TEST_CASE("partition shapes") {
  auto rng = make_engine(1, Stream::kPartition);
  const auto s = partition_features(5, 2, rng);
  REQUIRE(s.bundle_count() == 3);
  CHECK(s.bundle(0).size() == 2);
  CHECK(s.bundle(1).size() == 2);
  CHECK(s.bundle(2).size() == 1);
  std::set<std::size_t> all;
  for (std::size_t b = 0; b < 3; ++b) {
    for (auto j : s.bundle(b)) CHECK(all.insert(j).second);
  }
  CHECK(all.size() == 5);

  const auto whole = partition_features(7, 7, rng);
  CHECK(whole.bundle_count() == 1);
  CHECK(whole.bundle(0).size() == 7);

  CHECK_THROWS_AS(partition_features(5, 0, rng), ConfigError);
  CHECK_THROWS_AS(partition_features(5, 6, rng), ConfigError);

  auto a = make_engine(9, Stream::kPartition);
  auto b = make_engine(9, Stream::kPartition);
  const auto pa = partition_features(40, 6, a);
  const auto pb = partition_features(40, 6, b);
  CHECK(std::equal(pa.permutation().begin(), pa.permutation().end(),
                   pb.permutation().begin()));

  const auto cyc = cyclic_partition(5, 2);
  CHECK(cyc.bundle(2)[0] == 4);
}

TEST_CASE("partition is uniform") {
  // n = 6, P = 2: every feature lands in the first bundle with chance 1/3.
  std::vector<int> hits(6, 0);
  const int seeds = 10000;
  for (int seed = 0; seed < seeds; ++seed) {
    auto rng = make_engine(static_cast<std::uint64_t>(seed), Stream::kPartition);
    const auto schedule = partition_features(6, 2, rng);
    for (auto j : schedule.bundle(0)) ++hits[j];
  }
  for (int h : hits) CHECK(std::abs(double(h) / seeds - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("armijo and config validation") {
  ArmijoParams a;
  CHECK_NOTHROW(a.validate());
  a.beta = 1.0;
  CHECK_THROWS_AS(a.validate(), ConfigError);
  a = {};
  a.gamma = 1.0;
  CHECK_THROWS_AS(a.validate(), ConfigError);
  a = {};
  a.sigma = 0.0;
  CHECK_THROWS_AS(a.validate(), ConfigError);

  SolverConfig c;
  c.bundle_size = 0;
  try {
    c.validate(10);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("P must be in [1, n]") != std::string::npos);
  }
  c.bundle_size = 11;
  CHECK_THROWS_AS(c.validate(10), ConfigError);
  c.bundle_size = 10;
  CHECK_NOTHROW(c.validate(10));
  c.threads = 0;
  CHECK_THROWS_AS(c.validate(10), ConfigError);
  c.threads = 1;
  c.epsilon = 0.0;
  CHECK_THROWS_AS(c.validate(10), ConfigError);
  CHECK(parse_solver_kind("scdn") == SolverKind::kScdn);
  CHECK(parse_stopping_mode("gap") == StoppingMode::kReferenceGap);
  CHECK_THROWS_AS(parse_solver_kind("tron"), ConfigError);
}

TEST_CASE("bundle direction: support, descent and lambda_bar") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = oracle::random_dataset(40, 12, 0.4, rng);
    for (auto kind : {LossKind::kLogistic, LossKind::kSquaredHinge}) {
      const auto spec = LossSpec::make(kind, 2.0);
      const auto state =
          make_state(spec, d, oracle::random_weights(12, 0.3, rng));
      const std::vector<std::size_t> bundle{1, 4, 7, 11};
      const auto dir = compute_bundle_direction(spec, d, state, bundle, {});
      CHECK(dir.features == bundle);
      CHECK(dir.d.size() == 4);
      if (!dir.is_zero()) {
        CHECK(dir.delta <= 0.0);
        // Delta <= (gamma - 1) d^T H d with gamma = 0.
        CHECK(dir.delta <= -dir.curvature() + 1e-12);
      }
      const auto norms = column_squared_norms(d.matrix);
      double lb = 0;
      for (auto j : bundle) lb = std::max(lb, norms.lambda[j]);
      CHECK(dir.lambda_bar == lb);
      for (std::size_t k = 0; k < 4; ++k) {
        const auto gh = grad_hess_j(spec, d, state, bundle[k]);
        CHECK(dir.d[k] == newton_direction_1d(gh.g, gh.h, state.w[bundle[k]]));
      }
    }
  }
}

TEST_CASE("line search decreases the objective and keeps the cache exact") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = oracle::random_dataset(50, 10, 0.5, rng);
    for (auto kind : {LossKind::kLogistic, LossKind::kSquaredHinge}) {
      const auto spec = LossSpec::make(kind, 1.0);
      auto state = make_state(spec, d, oracle::random_weights(10, 0.2, rng));
      const double before = state.objective_value();
      const std::vector<std::size_t> bundle{0, 2, 3, 5, 9};
      const auto dir = compute_bundle_direction(spec, d, state, bundle, {});
      const auto ls = line_search_bundle(spec, d, state, dir, {});
      CHECK(state.objective_value() <= before + 1e-12);
      CHECK(ls.objective_change <= 0.01 * ls.alpha * dir.delta + 1e-12);
      const double direct = objective(spec, d, state.w);
      CHECK(state.objective_value() == doctest::Approx(direct).epsilon(1e-10));
      auto fresh = state;
      refresh_cache(spec, d, fresh);
      for (std::size_t i = 0; i < state.margin.size(); ++i) {
        CHECK(state.margin[i] == doctest::Approx(fresh.margin[i]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("line search failure is reported") {
  // Identical columns: the joint step is P times too long, so the full step
  // cannot satisfy the descent test and no backtracking is allowed.
  const auto d = make_correlated(60, 8, 3);
  const auto spec = LossSpec::squared_hinge(1.0);
  SolverConfig config;
  config.bundle_size = 8;
  config.armijo.max_steps = 0;
  CHECK_THROWS_AS(pcdn_solve(spec, d, config), LineSearchError);
}

TEST_CASE("solvers reach the optimum on small problems") {
  std::mt19937_64 rng(7);
  const auto d = oracle::random_dataset(80, 10, 0.5, rng);
  const auto x = oracle::to_dense(d.matrix);
  for (auto kind : {LossKind::kLogistic, LossKind::kSquaredHinge}) {
    const auto spec = LossSpec::make(kind, 1.0);
    const auto exact = oracle::exact_coordinate_descent(kind, 1.0, x, d.labels, 400);
    const double f_exact = oracle::objective(kind, 1.0, x, d.labels, exact);
    for (std::size_t P : {1u, 3u, 10u}) {
      SolverConfig config;
      config.bundle_size = P;
      config.epsilon = 1e-9;
      config.max_outer_iters = 5000;
      const auto r = pcdn_solve(spec, d, config);
      CHECK(r.status == SolveStatus::kConverged);
      CHECK(r.objective == doctest::Approx(f_exact).epsilon(1e-8));
      CHECK(r.objective == doctest::Approx(objective(spec, d, r.w)).epsilon(1e-10));
    }
  }
}

TEST_CASE("orthogonal features: one full bundle equals exact coordinate steps") {
  const auto d = make_orthogonal(6, 5, 11);
  const auto spec = LossSpec::squared_hinge(1.0);
  SolverConfig config;
  config.bundle_size = 6;
  config.epsilon = 1e-10;
  const auto r = pcdn_solve(spec, d, config);
  CHECK(r.status == SolveStatus::kConverged);
  for (const auto& t : r.traces) CHECK(t.alpha <= 1.0);
  // Squared hinge on disjoint supports: the first full step is exact when no
  // sample changes activity, so convergence is fast.
  CHECK(r.outer_iterations <= 20);
}

TEST_CASE("traces are monotone and well formed") {
  std::mt19937_64 rng(8);
  const auto d = oracle::random_dataset(60, 20, 0.3, rng);
  const auto spec = LossSpec::logistic(4.0);
  SolverConfig config;
  config.bundle_size = 5;
  config.epsilon = 1e-6;
  config.refresh_interval = 3;
  const auto r = pcdn_solve(spec, d, config);
  REQUIRE(!r.traces.empty());
  double prev = r.stats.initial_objective;
  for (std::size_t i = 0; i < r.traces.size(); ++i) {
    const auto& t = r.traces[i];
    CHECK(t.t == i);
    CHECK(t.objective <= prev + 1e-12);
    CHECK(std::isnan(t.rel_gap));
    prev = t.objective;
  }
  CHECK(r.inner_iterations == r.traces.size());
  CHECK(r.outer_objectives.size() == r.outer_iterations + 1);
  CHECK(r.traces.back().nnz == count_nonzeros(r.w));
}

TEST_CASE("cdn ignores P and equals P = 1") {
  std::mt19937_64 rng(9);
  const auto d = oracle::random_dataset(40, 8, 0.5, rng);
  const auto spec = LossSpec::logistic(1.0);
  SolverConfig config;
  config.solver = SolverKind::kCdn;
  config.bundle_size = 5;
  const auto a = solve(spec, d, config);
  config.solver = SolverKind::kPcdn;
  config.bundle_size = 1;
  const auto b = solve(spec, d, config);
  CHECK(a.w == b.w);
  CHECK(a.inner_iterations == b.inner_iterations);
}

TEST_CASE("budget exhaustion is a status, not an error") {
  std::mt19937_64 rng(10);
  const auto d = oracle::random_dataset(40, 8, 0.5, rng);
  SolverConfig config;
  config.max_outer_iters = 1;
  config.epsilon = 1e-12;
  const auto r = pcdn_solve(LossSpec::logistic(1.0), d, config);
  CHECK(r.status == SolveStatus::kBudgetExhausted);
  CHECK(r.outer_iterations == 1);
}

TEST_CASE("gap stopping needs a reference") {
  std::mt19937_64 rng(11);
  const auto d = oracle::random_dataset(40, 8, 0.5, rng);
  SolverConfig config;
  config.stopping = StoppingMode::kReferenceGap;
  CHECK_THROWS_AS(pcdn_solve(LossSpec::logistic(1.0), d, config), ConfigError);
  const auto ref = reference_solve(LossSpec::logistic(1.0), d);
  config.reference_objective = ref.objective;
  config.epsilon = 1e-4;
  const auto r = pcdn_solve(LossSpec::logistic(1.0), d, config);
  CHECK(r.status == SolveStatus::kConverged);
  CHECK(relative_gap(r.objective, ref.objective) <= 1e-4);
  CHECK(r.traces.back().rel_gap ==
        doctest::Approx(relative_gap(r.objective, ref.objective)));
}

TEST_CASE("thread count does not change the partition sequence") {
  SyntheticOptions opt;
  opt.samples = 10000;
  opt.features = 200;
  opt.density = 0.05;
  const auto d = make_synthetic(opt);
  const auto spec = LossSpec::logistic(1.0);
  SolverConfig config;
  config.bundle_size = 100;
  config.max_outer_iters = 3;
  config.epsilon = 1e-12;
  config.threads = 1;
  const auto one = pcdn_solve(spec, d, config);
  config.threads = 4;
  const auto four = pcdn_solve(spec, d, config);
  REQUIRE(one.traces.size() == four.traces.size());
  for (std::size_t i = 0; i < one.traces.size(); ++i) {
    CHECK(one.traces[i].lambda_bar == four.traces[i].lambda_bar);
    CHECK(one.traces[i].q == four.traces[i].q);
  }
  CHECK(four.objective == doctest::Approx(one.objective).epsilon(1e-10));
}

TEST_CASE("repeat runs are bitwise identical") {
  SyntheticOptions opt;
  opt.samples = 9000;
  opt.features = 100;
  opt.density = 0.05;
  const auto d = make_synthetic(opt);
  const auto spec = LossSpec::squared_hinge(0.5);
  SolverConfig config;
  config.bundle_size = 50;
  config.threads = 3;
  config.max_outer_iters = 4;
  const auto a = pcdn_solve(spec, d, config);
  const auto b = pcdn_solve(spec, d, config);
  CHECK(a.w == b.w);
  REQUIRE(a.traces.size() == b.traces.size());
  for (std::size_t i = 0; i < a.traces.size(); ++i) {
    CHECK(a.traces[i].objective == b.traces[i].objective);
    CHECK(a.traces[i].alpha == b.traces[i].alpha);
  }
}

TEST_CASE("scdn") {
  std::mt19937_64 rng(12);
  const auto d = oracle::random_dataset(60, 12, 0.4, rng);
  const auto spec = LossSpec::logistic(1.0);
  const auto ref = reference_solve(spec, d);

  SolverConfig config;
  config.solver = SolverKind::kScdn;
  config.scdn_parallel = 1;
  config.epsilon = 1e-7;
  config.max_outer_iters = 10000;
  const auto one = solve(spec, d, config);
  CHECK(one.status == SolveStatus::kConverged);
  CHECK(relative_gap(one.objective, ref.objective) <= 1e-6);

  config.scdn_parallel = 4;
  config.threads = 2;
  const auto four = solve(spec, d, config);
  const auto again = solve(spec, d, config);
  CHECK(four.w == again.w);

  const auto bad = make_correlated(100, 32, 5);
  config.scdn_parallel = 8;
  config.max_outer_iters = 200;
  CHECK_THROWS_AS(solve(LossSpec::squared_hinge(1.0), bad, config),
                  DivergenceError);
  CHECK_THROWS_AS(solve(LossSpec::logistic(1.0), bad, config),
                  DivergenceError);
}
