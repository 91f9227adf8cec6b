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

#ifndef PCDN_SYNTHETIC_H_
#define PCDN_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>

#include "pcdn/sparse_data.h"

namespace pcdn {

struct SyntheticOptions {
  std::size_t samples = 1000;
  std::size_t features = 100;
  double density = 0.01;        // expected fraction of nonzero entries
  std::uint64_t seed = 1;
  double truth_density = 0.1;   // nonzero fraction of the hidden weights
  double label_noise = 0.05;    // probability of flipping a label
  bool normalize = true;        // scale samples to unit norm
  // Every column gets exactly round(density * samples) entries of value
  // +-1/sqrt(count), so all column squared norms equal 1. Overrides
  // `normalize`.
  bool equal_column_norms = false;
};

// Sparse binary classification data. Labels are the sign of a sparse hidden
// linear model, flipped at rate label_noise.
Dataset make_synthetic(const SyntheticOptions& options);

// Every feature owns `rows_per_feature` samples that no other feature
// touches, so X^T X is diagonal.
Dataset make_orthogonal(std::size_t features, std::size_t rows_per_feature,
                        std::uint64_t seed);

// All `features` columns are the same dense column. Labels mostly follow
// the sign of that column with a fraction flipped, so the optimum is finite.
// Shotgun updates on this instance overshoot by the number of slots.
Dataset make_correlated(std::size_t samples, std::size_t features,
                        std::uint64_t seed);

}  // namespace pcdn

#endif  // PCDN_SYNTHETIC_H_
