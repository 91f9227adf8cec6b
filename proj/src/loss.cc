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

#include "pcdn/loss.h"

#include <algorithm>
#include <cmath>

#include "pcdn/error.h"

namespace pcdn {

std::string_view to_string(LossKind kind) {
  return kind == LossKind::kLogistic ? "logistic" : "l2svm";
}

LossKind parse_loss_kind(std::string_view text) {
  if (text == "logistic") return LossKind::kLogistic;
  if (text == "l2svm" || text == "squared_hinge") return LossKind::kSquaredHinge;
  throw ConfigError("unknown loss '" + std::string(text) +
                    "' (expected logistic or l2svm)");
}

LossSpec LossSpec::logistic(double c) {
  return {LossKind::kLogistic, c, 0.25, 1e-12};
}

LossSpec LossSpec::squared_hinge(double c) {
  return {LossKind::kSquaredHinge, c, 2.0, 1e-12};
}

LossSpec LossSpec::make(LossKind kind, double c) {
  return kind == LossKind::kLogistic ? logistic(c) : squared_hinge(c);
}

void LossSpec::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ConfigError("c must be a positive finite number");
  }
  const double expected = kind == LossKind::kLogistic ? 0.25 : 2.0;
  if (theta != expected) {
    throw ConfigError("theta does not match the loss kind");
  }
  if (!(nu > 0.0)) throw ConfigError("nu must be positive");
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double sample_loss(LossKind kind, double m) {
  if (kind == LossKind::kLogistic) {
    return std::log1p(std::exp(-std::abs(m))) + std::max(0.0, -m);
  }
  const double u = 1.0 - m;
  return u > 0.0 ? u * u : 0.0;
}

namespace {

std::vector<double> compute_margins(const Dataset& data,
                                    std::span<const double> w) {
  const auto& m = data.matrix;
  std::vector<double> margin(m.n_samples(), 0.0);
  for (std::size_t j = 0; j < m.n_features(); ++j) {
    const double wj = w[j];
    if (wj == 0.0) continue;
    const auto col = m.column_unchecked(j);
    for (std::size_t k = 0; k < col.size(); ++k) {
      margin[col.rows[k]] += wj * col.values[k];
    }
  }
  return margin;
}

double objective_from_margins(const LossSpec& spec, const Dataset& data,
                              std::span<const double> margin,
                              std::span<const double> w) {
  CompensatedSum loss;
  for (std::size_t i = 0; i < margin.size(); ++i) {
    loss.add(sample_loss(spec.kind, data.labels[i] * margin[i]));
  }
  CompensatedSum total;
  total.add(spec.c * loss.value());
  for (double wj : w) total.add(std::abs(wj));
  const double value = total.value();
  if (!std::isfinite(value)) throw NumericError("objective is not finite");
  return value;
}

void check_weights(const Dataset& data, std::span<const double> w) {
  if (w.size() != data.n_features()) {
    throw ConfigError("weight vector length " + std::to_string(w.size()) +
                      " does not match feature count " +
                      std::to_string(data.n_features()));
  }
  for (double v : w) {
    if (!std::isfinite(v)) throw NumericError("weights are not finite");
  }
}

}  // namespace

double objective(const LossSpec& spec, const Dataset& data,
                 std::span<const double> w) {
  check_weights(data, w);
  const auto margin = compute_margins(data, w);
  return objective_from_margins(spec, data, margin, w);
}

double objective(const LossSpec& spec, const Dataset& data,
                 const ModelState& state) {
  return objective(spec, data, std::span<const double>(state.w));
}

void refresh_cache(const LossSpec& spec, const Dataset& data,
                   ModelState& state) {
  check_weights(data, state.w);
  state.margin = compute_margins(data, state.w);
  if (spec.kind == LossKind::kLogistic) {
    state.exp_margin.resize(state.margin.size());
    for (std::size_t i = 0; i < state.margin.size(); ++i) {
      const double e = std::exp(state.margin[i]);
      if (!std::isfinite(e)) {
        throw NumericError("exp(w^T x) overflows for sample " +
                           std::to_string(i));
      }
      state.exp_margin[i] = e;
    }
  } else {
    state.exp_margin.clear();
  }
  state.objective =
      CompensatedSum(objective_from_margins(spec, data, state.margin, state.w));
}

ModelState make_state(const LossSpec& spec, const Dataset& data) {
  return make_state(spec, data, std::vector<double>(data.n_features(), 0.0));
}

ModelState make_state(const LossSpec& spec, const Dataset& data,
                      std::vector<double> w) {
  ModelState state;
  state.w = std::move(w);
  refresh_cache(spec, data, state);
  return state;
}

GradHess grad_hess_j(const LossSpec& spec, const Dataset& data,
                     const ModelState& state, std::size_t j) {
  const auto col = data.matrix.column_unchecked(j);
  double g = 0.0;
  double h = 0.0;
  if (spec.kind == LossKind::kLogistic) {
    // tau(y w^T x) - 1 is -1/(1+e) for y=+1 and -e/(1+e) for y=-1;
    // tau (1 - tau) = e / (1+e)^2 for either label.
    for (std::size_t k = 0; k < col.size(); ++k) {
      const auto i = col.rows[k];
      const double x = col.values[k];
      const double e = state.exp_margin[i];
      double p, q;  // 1/(1+e), e/(1+e)
      if (std::isfinite(e)) {
        p = 1.0 / (1.0 + e);
        q = e * p;
      } else {
        p = 0.0;
        q = 1.0;
      }
      g += data.labels[i] > 0 ? -x * p : x * q;
      h += x * x * p * q;
    }
  } else {
    for (std::size_t k = 0; k < col.size(); ++k) {
      const auto i = col.rows[k];
      const double x = col.values[k];
      const double y = data.labels[i];
      const double slack = 1.0 - y * state.margin[i];
      if (slack > 0.0) {  // strict: y w^T x < 1
        g -= 2.0 * y * x * slack;
        h += 2.0 * x * x;
      }
    }
  }
  g *= spec.c;
  h *= spec.c;
  if (h <= spec.nu) h = spec.nu;
  return {g, h};
}

double gradient_j(const LossSpec& spec, const Dataset& data,
                  const ModelState& state, std::size_t j) {
  return grad_hess_j(spec, data, state, j).g;
}

std::vector<double> min_norm_subgradient(const LossSpec& spec,
                                         const Dataset& data,
                                         const ModelState& state) {
  std::vector<double> out(data.n_features());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double g = gradient_j(spec, data, state, j);
    const double wj = state.w[j];
    if (wj > 0.0) {
      out[j] = g + 1.0;
    } else if (wj < 0.0) {
      out[j] = g - 1.0;
    } else {
      const double excess = std::max(std::abs(g) - 1.0, 0.0);
      out[j] = g < 0.0 ? -excess : excess;
    }
  }
  return out;
}

double min_norm_subgradient_l1(const LossSpec& spec, const Dataset& data,
                               const ModelState& state) {
  double sum = 0.0;
  for (double v : min_norm_subgradient(spec, data, state)) sum += std::abs(v);
  return sum;
}

}  // namespace pcdn
