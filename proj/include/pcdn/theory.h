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

#ifndef PCDN_THEORY_H_
#define PCDN_THEORY_H_

#include <cstddef>
#include <span>
#include <vector>

#include "pcdn/loss.h"
#include "pcdn/solver.h"
#include "pcdn/sparse_data.h"

namespace pcdn {

// Column squared norms sorted ascending: lambda_1 <= ... <= lambda_n.
class LambdaSpectrum {
 public:
  LambdaSpectrum() = default;
  // Sorts a copy; throws ConfigError on negative or non-finite entries.
  explicit LambdaSpectrum(std::vector<double> values);
  static LambdaSpectrum from_norms(const ColumnSquaredNorms& norms) {
    return LambdaSpectrum(norms.lambda);
  }

  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// E over uniformly random size-P feature subsets of the largest lambda in
// the subset:
//   f(P) = sum_{k=P}^{n} lambda_k C(k-1, P-1) / C(n, P).
// Weights come from the ratio recurrence w_{k-1} = w_k (k - P) / (k - 1),
// w_n = P / n, and are summed with compensation; no factorials appear, so n
// may be in the millions.
double expected_max_lambda(const LambdaSpectrum& spectrum, std::size_t P);

// Same expectation by visiting every size-P subset; the sum of maxima is
// accumulated in exact rational arithmetic. Throws ConfigError for n > 22.
double expected_max_lambda_bruteforce(const LambdaSpectrum& spectrum,
                                      std::size_t P);

// Upper bound on the expected number of Armijo backtracking steps:
//   1 + log_{1/beta}(theta c / (2 h_lower (1 - sigma + sigma gamma)))
//     + log_{1/beta}(P) / 2 + log_{1/beta} E[lambda_bar].
double line_search_step_bound(std::size_t P, const LambdaSpectrum& spectrum,
                              double theta, double c, double h_lower,
                              const ArmijoParams& armijo);

// Quantities measured on a run that the iteration bound needs. They are
// empirical, so the bound is a post-hoc diagnostic.
struct RunBoundInputs {
  double inf_alpha = 0.0;
  double sup_alpha = 0.0;
  double w_star_sq_norm = 0.0;  // ||w*||^2 of the reference optimum
  double initial_objective = 0.0;  // F(0)
  double h_lower = 0.0;  // smallest Hessian diagonal observed
};

// T_eps^up = n E[lambda_bar] / (inf_alpha P eps)
//            * [theta c ||w*||^2 / 2
//               + theta c sup_alpha F(0) / (2 sigma (1 - gamma) h_lower)]
double iteration_upper_bound(const RunBoundInputs& run,
                             const LambdaSpectrum& spectrum, std::size_t P,
                             double epsilon, const LossSpec& spec,
                             const ArmijoParams& armijo);

struct BoundReport {
  std::size_t P = 0;
  double expected_lambda_bar = 0.0;
  double expected_lambda_bar_over_P = 0.0;
  double q_bound = 0.0;
  double t_eps_up = 0.0;
  double theta = 0.0;
  double c = 0.0;
  double h_lower = 0.0;
  ArmijoParams armijo;
  double epsilon = 0.0;
  RunBoundInputs run;
};

BoundReport make_bound_report(const RunBoundInputs& run,
                              const LambdaSpectrum& spectrum, std::size_t P,
                              double epsilon, const LossSpec& spec,
                              const ArmijoParams& armijo);

}  // namespace pcdn

#endif  // PCDN_THEORY_H_
