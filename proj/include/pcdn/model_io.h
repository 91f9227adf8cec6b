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

#ifndef PCDN_MODEL_IO_H_
#define PCDN_MODEL_IO_H_

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "pcdn/loss.h"

namespace pcdn {

struct Model {
  LossKind loss = LossKind::kLogistic;
  double c = 1.0;
  std::vector<double> w;  // dense, length n
};

// Text format:
//   pcdn-model n=<n> loss=<logistic|l2svm> c=<c> nnz=<k>
//   <1-based index>:<weight>      (k lines, increasing index)
//   end
// Weights use 17 significant digits, so reading back reproduces w exactly.
void write_model(std::ostream& out, const Model& model);
void save_model(const std::filesystem::path& path, const Model& model);

// Throws ParseError on malformed or truncated input.
Model read_model(std::istream& in);
Model load_model(const std::filesystem::path& path);

}  // namespace pcdn

#endif  // PCDN_MODEL_IO_H_
