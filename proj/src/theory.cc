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

#include "pcdn/theory.h"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "pcdn/error.h"

namespace pcdn {

LambdaSpectrum::LambdaSpectrum(std::vector<double> values)
    : sorted_(std::move(values)) {
  for (double v : sorted_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("spectrum entries must be finite and nonnegative");
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
}

namespace {

void check_bundle_size(std::size_t n, std::size_t P) {
  if (P < 1 || P > n) {
    throw ConfigError("P must be in [1, n] (n = " + std::to_string(n) + ")");
  }
}

}  // namespace

double expected_max_lambda(const LambdaSpectrum& spectrum, std::size_t P) {
  const auto n = spectrum.size();
  check_bundle_size(n, P);
  const auto lambda = spectrum.sorted();
  if (P == n) return lambda.back();
  if (P == 1) {
    CompensatedSum sum;
    for (double v : lambda) sum.add(v);
    return sum.value() / double(n);
  }
  // 1-based k; weight(k) = C(k-1, P-1) / C(n, P).
  CompensatedSum sum;
  double weight = double(P) / double(n);
  for (std::size_t k = n; k >= P; --k) {
    if (weight == 0.0) break;  // remaining weights underflowed
    sum.add(lambda[k - 1] * weight);
    if (k == P) break;
    weight *= double(k - P) / double(k - 1);
  }
  return sum.value();
}

double expected_max_lambda_bruteforce(const LambdaSpectrum& spectrum,
                                      std::size_t P) {
  using boost::multiprecision::cpp_rational;
  const auto n = spectrum.size();
  if (n > 22) throw ConfigError("brute-force enumeration limited to n <= 22");
  check_bundle_size(n, P);
  const auto lambda = spectrum.sorted();

  // How often each position holds the subset maximum (first one on ties).
  std::vector<unsigned long long> wins(n, 0);
  unsigned long long subsets = 0;
  const std::uint32_t last = 1u << n;
  for (std::uint32_t mask = (1u << P) - 1; mask < last;) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) {
        if (best == n || lambda[i] > lambda[best]) best = i;
      }
    }
    ++wins[best];
    ++subsets;
    // Gosper's hack: next mask with the same popcount.
    const std::uint32_t low = mask & (~mask + 1u);
    const std::uint32_t ripple = mask + low;
    if (ripple == 0) break;
    mask = (((ripple ^ mask) >> 2) / low) | ripple;
  }

  cpp_rational total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (wins[i] == 0) continue;
    // Doubles are dyadic rationals, so this conversion is exact.
    int exponent = 0;
    const double mantissa = std::frexp(lambda[i], &exponent);
    const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    cpp_rational value(scaled);
    if (exponent - 53 >= 0) {
      value *= cpp_rational(boost::multiprecision::cpp_int(1) << (exponent - 53));
    } else {
      value /= cpp_rational(boost::multiprecision::cpp_int(1) << (53 - exponent));
    }
    total += value * cpp_rational(wins[i]);
  }
  total /= cpp_rational(subsets);
  return static_cast<double>(total);
}

double line_search_step_bound(std::size_t P, const LambdaSpectrum& spectrum,
                              double theta, double c, double h_lower,
                              const ArmijoParams& armijo) {
  if (!(h_lower > 0.0)) throw ConfigError("h_lower must be positive");
  armijo.validate();
  const double log_base = std::log(1.0 / armijo.beta);
  auto log_b = [&](double x) { return std::log(x) / log_base; };
  const double expected = expected_max_lambda(spectrum, P);
  const double constant =
      theta * c /
      (2.0 * h_lower * (1.0 - armijo.sigma + armijo.sigma * armijo.gamma));
  return 1.0 + log_b(constant) + 0.5 * log_b(double(P)) + log_b(expected);
}

double iteration_upper_bound(const RunBoundInputs& run,
                             const LambdaSpectrum& spectrum, std::size_t P,
                             double epsilon, const LossSpec& spec,
                             const ArmijoParams& armijo) {
  if (!(run.inf_alpha > 0.0) || !(run.sup_alpha > 0.0) ||
      !(run.h_lower > 0.0) || !(run.initial_objective > 0.0) ||
      !(run.w_star_sq_norm >= 0.0)) {
    throw ConfigError("iteration bound needs inf/sup alpha, h_lower, F(0) "
                      "and ||w*||^2 from a run");
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const double n = double(spectrum.size());
  const double expected = expected_max_lambda(spectrum, P);
  const double tc = spec.theta * spec.c;
  const double bracket =
      tc * run.w_star_sq_norm / 2.0 +
      tc * run.sup_alpha * run.initial_objective /
          (2.0 * armijo.sigma * (1.0 - armijo.gamma) * run.h_lower);
  return n * expected / (run.inf_alpha * double(P) * epsilon) * bracket;
}

BoundReport make_bound_report(const RunBoundInputs& run,
                              const LambdaSpectrum& spectrum, std::size_t P,
                              double epsilon, const LossSpec& spec,
                              const ArmijoParams& armijo) {
  BoundReport report;
  report.P = P;
  report.expected_lambda_bar = expected_max_lambda(spectrum, P);
  report.expected_lambda_bar_over_P = report.expected_lambda_bar / double(P);
  report.q_bound = line_search_step_bound(P, spectrum, spec.theta, spec.c,
                                          run.h_lower, armijo);
  report.t_eps_up =
      iteration_upper_bound(run, spectrum, P, epsilon, spec, armijo);
  report.theta = spec.theta;
  report.c = spec.c;
  report.h_lower = run.h_lower;
  report.armijo = armijo;
  report.epsilon = epsilon;
  report.run = run;
  return report;
}

}  // namespace pcdn
