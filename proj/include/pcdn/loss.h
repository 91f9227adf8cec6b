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

#ifndef PCDN_LOSS_H_
#define PCDN_LOSS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcdn/sparse_data.h"

namespace pcdn {

enum class LossKind { kLogistic, kSquaredHinge };

std::string_view to_string(LossKind kind);
// Accepts "logistic" and "l2svm" (alias "squared_hinge").
LossKind parse_loss_kind(std::string_view text);

// F_c(w) = c * sum_i phi(y_i w^T x_i) + ||w||_1
struct LossSpec {
  LossKind kind = LossKind::kLogistic;
  double c = 1.0;
  double theta = 0.25;  // Hessian-diagonal curvature constant
  double nu = 1e-12;    // floor applied to every Hessian diagonal entry

  static LossSpec logistic(double c);
  static LossSpec squared_hinge(double c);
  static LossSpec make(LossKind kind, double c);

  void validate() const;  // throws ConfigError
};

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double value) : sum_(value) {}
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Weights plus per-sample cached quantities.
//
// margin[i] = w^T x_i for both losses; for the logistic loss exp_margin[i]
// caches exp(w^T x_i) so directions and line searches never call exp() on
// the sample side except when the cache is updated.
struct ModelState {
  std::vector<double> w;
  std::vector<double> margin;
  std::vector<double> exp_margin;  // logistic only, empty otherwise
  CompensatedSum objective;

  double objective_value() const { return objective.value(); }
};

// State at w = 0 with the cache and objective filled in.
ModelState make_state(const LossSpec& spec, const Dataset& data);
// State at the given weights; throws NumericError on overflow.
ModelState make_state(const LossSpec& spec, const Dataset& data,
                      std::vector<double> w);

// Per-sample loss phi(m) at margin m = y w^T x, overflow-safe.
double sample_loss(LossKind kind, double m);

// Full objective from scratch, independent of any cache.
double objective(const LossSpec& spec, const Dataset& data,
                 std::span<const double> w);
double objective(const LossSpec& spec, const Dataset& data,
                 const ModelState& state);

struct GradHess {
  double g;
  double h;
};

// j-th gradient and Hessian diagonal of L at the cached state. h is floored
// at spec.nu so it is always positive.
GradHess grad_hess_j(const LossSpec& spec, const Dataset& data,
                     const ModelState& state, std::size_t j);

// Gradient only; same accumulation order as grad_hess_j.
double gradient_j(const LossSpec& spec, const Dataset& data,
                  const ModelState& state, std::size_t j);

// Rebuilds margins, exponentials and the objective from w.
void refresh_cache(const LossSpec& spec, const Dataset& data,
                   ModelState& state);

// Applies margin[i] += delta to one sample's cache. Exponentials are
// updated multiplicatively and rebuilt from the margin once |margin| > 30.
// Returns false if the cache became non-finite.
inline bool apply_margin_delta(ModelState& state, std::size_t i,
                               double delta, double exp_delta);

// Minimum-norm subgradient of F_c: zero iff w is optimal.
std::vector<double> min_norm_subgradient(const LossSpec& spec,
                                         const Dataset& data,
                                         const ModelState& state);
double min_norm_subgradient_l1(const LossSpec& spec, const Dataset& data,
                               const ModelState& state);

// Change of c * phi for one sample when its margin w^T x_i moves by `step`,
// computed from cached quantities only (descent condition form).
inline double loss_change(const LossSpec& spec, const ModelState& state,
                          std::size_t i, std::int8_t label, double step);

// |w + a| - |w| without cancellation when the sign is preserved.
inline double abs_change(double w, double a) {
  const double moved = w + a;
  if (w > 0.0 && moved >= 0.0) return a;
  if (w < 0.0 && moved <= 0.0) return -a;
  return std::abs(moved) - std::abs(w);
}

}  // namespace pcdn

#include "pcdn/loss_inl.h"

#endif  // PCDN_LOSS_H_
