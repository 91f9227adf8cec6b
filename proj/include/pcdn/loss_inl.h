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

#ifndef PCDN_LOSS_INL_H_
#define PCDN_LOSS_INL_H_

#include <cmath>

namespace pcdn {

inline constexpr double kExpRebuildThreshold = 30.0;

inline bool apply_margin_delta(ModelState& state, std::size_t i, double delta,
                               double exp_delta) {
  const double m = state.margin[i] + delta;
  state.margin[i] = m;
  if (state.exp_margin.empty()) return std::isfinite(m);
  double e;
  if (std::abs(m) > kExpRebuildThreshold) {
    e = std::exp(m);
  } else {
    e = state.exp_margin[i] * exp_delta;
  }
  state.exp_margin[i] = e;
  return std::isfinite(m) && std::isfinite(e) && e > 0.0;
}

inline double loss_change(const LossSpec& spec, const ModelState& state,
                          std::size_t i, std::int8_t label, double step) {
  if (spec.kind == LossKind::kLogistic) {
    // log((e' + 1) / (e' + e^a)) + a [y = -1], with e' = e * e^a, rewritten
    // as log1p(expm1(-a) / (1 + e)) to stay accurate for small a.
    const double e = state.exp_margin[i];
    const double inv = std::isfinite(e) ? 1.0 / (1.0 + e) : 0.0;
    double change = std::log1p(std::expm1(-step) * inv);
    if (label < 0) change += step;
    return spec.c * change;
  }
  const double move = label * step;
  const double m_old = label * state.margin[i];
  const double m_new = m_old + move;
  const double u_old = m_old < 1.0 ? 1.0 - m_old : 0.0;
  if (m_old < 1.0 && m_new < 1.0) {
    // Both inside the active set: u_new - u_old is exactly -move, so the
    // error stays proportional to the step.
    return spec.c * (-move * (2.0 * u_old - move));
  }
  const double u_new = m_new < 1.0 ? 1.0 - m_new : 0.0;
  return spec.c * ((u_new - u_old) * (u_new + u_old));
}

}  // namespace pcdn

#endif  // PCDN_LOSS_INL_H_
