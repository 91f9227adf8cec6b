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

#include "pcdn/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "pcdn/error.h"
#include "pcdn/rng.h"

namespace pcdn {

namespace {

// Distinct sorted indices in [0, range), Floyd's sampling.
std::vector<std::uint32_t> sample_rows(std::size_t count, std::size_t range,
                                       std::mt19937_64& rng) {
  std::unordered_set<std::uint32_t> chosen;
  chosen.reserve(count * 2);
  std::vector<std::uint32_t> rows;
  rows.reserve(count);
  for (std::size_t j = range - count; j < range; ++j) {
    std::uniform_int_distribution<std::size_t> dist(0, j);
    auto t = static_cast<std::uint32_t>(dist(rng));
    if (!chosen.insert(t).second) {
      t = static_cast<std::uint32_t>(j);
      chosen.insert(t);
    }
    rows.push_back(t);
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::vector<std::int8_t> labels_from_scores(std::span<const double> score,
                                            double noise,
                                            std::mt19937_64& rng) {
  std::bernoulli_distribution flip(noise);
  std::vector<std::int8_t> labels(score.size());
  for (std::size_t i = 0; i < score.size(); ++i) {
    std::int8_t y = score[i] >= 0.0 ? 1 : -1;
    if (flip(rng)) y = static_cast<std::int8_t>(-y);
    labels[i] = y;
  }
  return labels;
}

}  // namespace

Dataset make_synthetic(const SyntheticOptions& options) {
  const auto s = options.samples;
  const auto n = options.features;
  if (s == 0 || n == 0) throw ConfigError("synthetic data needs s, n >= 1");
  if (!(options.density > 0.0 && options.density <= 1.0)) {
    throw ConfigError("density must be in (0, 1]");
  }
  if (!(options.label_noise >= 0.0 && options.label_noise < 0.5)) {
    throw ConfigError("label noise must be in [0, 0.5)");
  }

  auto matrix_rng = make_engine(options.seed, Stream::kSynthetic, 0);
  auto truth_rng = make_engine(options.seed, Stream::kSynthetic, 1);
  auto noise_rng = make_engine(options.seed, Stream::kSynthetic, 2);

  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::uint32_t> rows;
  std::vector<double> values;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::binomial_distribution<std::size_t> count_dist(s, options.density);
  const auto fixed_count = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(options.density * double(s))), 1,
      s);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t j = 0; j < n; ++j) {
    const auto count =
        options.equal_column_norms ? fixed_count : count_dist(matrix_rng);
    const auto picked = sample_rows(count, s, matrix_rng);
    const double unit = 1.0 / std::sqrt(double(count));
    for (auto r : picked) {
      rows.push_back(r);
      values.push_back(options.equal_column_norms
                           ? (coin(matrix_rng) ? unit : -unit)
                           : gauss(matrix_rng));
    }
    offsets[j + 1] = rows.size();
  }

  if (options.normalize && !options.equal_column_norms) {
    std::vector<double> row_sq(s, 0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      row_sq[rows[k]] += values[k] * values[k];
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
      values[k] /= std::sqrt(row_sq[rows[k]]);
    }
  }

  std::vector<double> truth(n, 0.0);
  std::bernoulli_distribution active(options.truth_density);
  for (std::size_t j = 0; j < n; ++j) {
    if (active(truth_rng)) truth[j] = gauss(truth_rng);
  }
  if (std::all_of(truth.begin(), truth.end(), [](double v) { return v == 0; })) {
    truth[0] = 1.0;
  }
  std::vector<double> score(s, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (auto k = offsets[j]; k < offsets[j + 1]; ++k) {
      score[rows[k]] += truth[j] * values[k];
    }
  }

  Dataset data;
  data.matrix = SparseDesignMatrix(s, n, std::move(offsets), std::move(rows),
                                   std::move(values));
  data.labels = labels_from_scores(score, options.label_noise, noise_rng);
  return data;
}

Dataset make_orthogonal(std::size_t features, std::size_t rows_per_feature,
                        std::uint64_t seed) {
  if (features == 0 || rows_per_feature == 0) {
    throw ConfigError("orthogonal instance needs features, rows >= 1");
  }
  auto rng = make_engine(seed, Stream::kSynthetic, 3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const auto s = features * rows_per_feature;
  std::vector<std::size_t> offsets(features + 1, 0);
  std::vector<std::uint32_t> rows;
  std::vector<double> values;
  std::vector<std::int8_t> labels(s);
  for (std::size_t j = 0; j < features; ++j) {
    for (std::size_t r = 0; r < rows_per_feature; ++r) {
      const auto i = j * rows_per_feature + r;
      rows.push_back(static_cast<std::uint32_t>(i));
      values.push_back(gauss(rng));
      labels[i] = coin(rng) ? 1 : -1;
    }
    offsets[j + 1] = rows.size();
  }
  Dataset data;
  data.matrix = SparseDesignMatrix(s, features, std::move(offsets),
                                   std::move(rows), std::move(values));
  data.labels = std::move(labels);
  return data;
}

Dataset make_correlated(std::size_t samples, std::size_t features,
                        std::uint64_t seed) {
  if (samples == 0 || features == 0) {
    throw ConfigError("correlated instance needs samples, features >= 1");
  }
  auto rng = make_engine(seed, Stream::kSynthetic, 4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> base(samples);
  for (auto& v : base) {
    v = gauss(rng);
    if (v == 0.0) v = 1.0;
  }
  const auto labels = labels_from_scores(base, 0.2, rng);

  std::vector<std::size_t> offsets(features + 1, 0);
  std::vector<std::uint32_t> rows;
  std::vector<double> values;
  rows.reserve(samples * features);
  values.reserve(samples * features);
  for (std::size_t j = 0; j < features; ++j) {
    for (std::size_t i = 0; i < samples; ++i) {
      rows.push_back(static_cast<std::uint32_t>(i));
      values.push_back(base[i]);
    }
    offsets[j + 1] = rows.size();
  }
  Dataset data;
  data.matrix = SparseDesignMatrix(samples, features, std::move(offsets),
                                   std::move(rows), std::move(values));
  data.labels = labels;
  return data;
}

}  // namespace pcdn
