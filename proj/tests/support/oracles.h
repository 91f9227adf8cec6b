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

#ifndef PCDN_TESTS_SUPPORT_ORACLES_H_
#define PCDN_TESTS_SUPPORT_ORACLES_H_

// Reference computations written against dense arrays and textbook
// formulas only. Nothing here calls into the library's loss or solver code.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "pcdn/loss.h"
#include "pcdn/sparse_data.h"

namespace oracle {

using Dense = std::vector<std::vector<double>>;  // [sample][feature]

Dense to_dense(const pcdn::SparseDesignMatrix& m);
pcdn::Dataset from_dense(const Dense& x, const std::vector<std::int8_t>& y);

// Random dense-ish instance with the given fill ratio.
pcdn::Dataset random_dataset(std::size_t s, std::size_t n, double fill,
                             std::mt19937_64& rng, double scale = 1.0);
std::vector<double> random_weights(std::size_t n, double scale,
                                   std::mt19937_64& rng);

double phi(pcdn::LossKind kind, long double m);
// c * sum phi(y_i w^T x_i), long double accumulation.
double loss(pcdn::LossKind kind, double c, const Dense& x,
            const std::vector<std::int8_t>& y, const std::vector<double>& w);
double objective(pcdn::LossKind kind, double c, const Dense& x,
                 const std::vector<std::int8_t>& y,
                 const std::vector<double>& w);
double column_squared_norm(const Dense& x, std::size_t j);

// Central difference of the smooth part along coordinate j.
double fd_gradient(pcdn::LossKind kind, double c, const Dense& x,
                   const std::vector<std::int8_t>& y, std::vector<double> w,
                   std::size_t j, double step);

// Minimum of a unimodal f on [a, b].
double golden_section(const std::function<double(double)>& f, double a,
                      double b, double tol = 1e-13);

// argmin_d g d + h d^2 / 2 + |w + d| by golden section on each side of the
// kink at d = -w plus the kink itself.
double brute_force_direction(double g, double h, double w);

// Exact cyclic coordinate minimization: every 1-D subproblem is solved by
// bisection on its subdifferential. Slow, only for tiny instances.
std::vector<double> exact_coordinate_descent(pcdn::LossKind kind, double c,
                                             const Dense& x,
                                             const std::vector<std::int8_t>& y,
                                             int sweeps);

}  // namespace oracle

#endif  // PCDN_TESTS_SUPPORT_ORACLES_H_
