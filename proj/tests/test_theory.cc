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

#include "pcdn/error.h"
#include "pcdn/theory.h"

using namespace pcdn;

namespace {

double lg(double x) { return std::log(x) / std::log(2.0); }

LambdaSpectrum random_spectrum(std::size_t n, std::mt19937_64& rng) {
  std::lognormal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return LambdaSpectrum(v);
}

}  // namespace

TEST_CASE("spectrum is sorted and validated") {
  const LambdaSpectrum s({3, 1, 2});
  CHECK(s.sorted()[0] == 1);
  CHECK(s.sorted()[2] == 3);
  CHECK_THROWS_AS(LambdaSpectrum({1, -1}), ConfigError);
  CHECK_THROWS_AS(LambdaSpectrum({1, NAN}), ConfigError);
}

TEST_CASE("expected max examples") {
  const LambdaSpectrum ones({1, 1, 1});
  for (std::size_t P = 1; P <= 3; ++P) {
    CHECK(expected_max_lambda(ones, P) == doctest::Approx(1.0).epsilon(1e-15));
  }
  const LambdaSpectrum s({1, 2, 3});
  CHECK(expected_max_lambda(s, 2) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  CHECK(expected_max_lambda(s, 1) == 2.0);
  CHECK(expected_max_lambda(s, 3) == 3.0);
  CHECK_THROWS_AS(expected_max_lambda(s, 0), ConfigError);
  CHECK_THROWS_AS(expected_max_lambda(s, 4), ConfigError);
}

TEST_CASE("brute force examples") {
  CHECK(expected_max_lambda_bruteforce(LambdaSpectrum({5}), 1) == 5.0);
  CHECK(expected_max_lambda_bruteforce(LambdaSpectrum({1, 2, 3}), 2) ==
        doctest::Approx(8.0 / 3.0).epsilon(1e-16));
  CHECK_THROWS_AS(
      expected_max_lambda_bruteforce(LambdaSpectrum(std::vector<double>(23, 1.0)), 2),
      ConfigError);
}

TEST_CASE("closed form agrees with enumeration for every P, n <= 12") {
  std::mt19937_64 rng(1);
  for (std::size_t n = 1; n <= 12; ++n) {
    const auto s = random_spectrum(n, rng);
    for (std::size_t P = 1; P <= n; ++P) {
      const double brute = expected_max_lambda_bruteforce(s, P);
      CHECK(std::abs(expected_max_lambda(s, P) - brute) <= 1e-12 * brute);
    }
  }
  const auto s = random_spectrum(10, rng);
  CHECK(expected_max_lambda(s, 4) ==
        doctest::Approx(expected_max_lambda_bruteforce(s, 4)).epsilon(1e-12));
}

TEST_CASE("huge n stays finite") {
  std::vector<double> v(2000000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = double(i % 1000) / 1000.0;
  const LambdaSpectrum s(std::move(v));
  const double e = expected_max_lambda(s, 1000);
  CHECK(std::isfinite(e));
  CHECK(e <= 0.999);
  CHECK(e >= 0.998);
}

TEST_CASE("step bound arithmetic") {
  // theta c / (2 h (1 - sigma)) = 0.25 / (0.02 * 0.99) = 25 / 1.98.
  const LambdaSpectrum ones(std::vector<double>(8, 1.0));
  const ArmijoParams a;
  const double want = 1.0 + lg(25.0 / (2.0 * 0.99)) + 0.5 * lg(4.0) + 0.0;
  CHECK(line_search_step_bound(4, ones, 0.25, 1.0, 0.01, a) ==
        doctest::Approx(want).epsilon(1e-14));
  CHECK_THROWS_AS(line_search_step_bound(4, ones, 0.25, 1.0, 0.0, a),
                  ConfigError);

  // Uniform spectrum: growth is exactly half a log per doubling.
  for (std::size_t P = 1; P <= 4; P *= 2) {
    CHECK(line_search_step_bound(2 * P, ones, 0.25, 1.0, 0.01, a) -
              line_search_step_bound(P, ones, 0.25, 1.0, 0.01, a) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }

  std::mt19937_64 rng(2);
  const auto s = random_spectrum(64, rng);
  double prev = -INFINITY;
  for (std::size_t P = 1; P <= 64; P *= 2) {
    const double b = line_search_step_bound(P, s, 2.0, 1.0, 1e-3, a);
    CHECK(b >= prev);
    if (P > 1) {
      const double gain = 0.5 + lg(expected_max_lambda(s, P)) -
                          lg(expected_max_lambda(s, P / 2));
      CHECK(b - prev <= gain + 1e-12);
    }
    prev = b;
  }
}

TEST_CASE("iteration bound scaling") {
  std::mt19937_64 rng(3);
  const auto s = random_spectrum(50, rng);
  const auto spec = LossSpec::logistic(2.0);
  const ArmijoParams a;
  RunBoundInputs run{0.25, 1.0, 3.0, 100.0, 1e-3};
  const double base = iteration_upper_bound(run, s, 1, 1e-3, spec, a);
  for (std::size_t P : {2u, 5u, 10u, 50u}) {
    const double ratio = iteration_upper_bound(run, s, P, 1e-3, spec, a) / base;
    const double want = (expected_max_lambda(s, P) / double(P)) /
                        expected_max_lambda(s, 1);
    CHECK(ratio == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(iteration_upper_bound(run, s, 5, 5e-4, spec, a) ==
        doctest::Approx(2.0 * iteration_upper_bound(run, s, 5, 1e-3, spec, a))
            .epsilon(1e-14));

  const LambdaSpectrum ones(std::vector<double>(40, 1.0));
  const double one = iteration_upper_bound(run, ones, 1, 1e-3, spec, a);
  for (std::size_t P : {2u, 4u, 8u, 40u}) {
    CHECK(iteration_upper_bound(run, ones, P, 1e-3, spec, a) * double(P) ==
          doctest::Approx(one).epsilon(1e-12));
  }

  RunBoundInputs missing;
  CHECK_THROWS_AS(iteration_upper_bound(missing, s, 1, 1e-3, spec, a),
                  ConfigError);

  const auto report = make_bound_report(run, s, 5, 1e-3, spec, a);
  CHECK(report.expected_lambda_bar_over_P ==
        doctest::Approx(report.expected_lambda_bar / 5));
  CHECK(report.t_eps_up > 0);
  CHECK(std::isfinite(report.q_bound));
}
