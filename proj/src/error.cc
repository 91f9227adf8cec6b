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

#include "pcdn/error.h"

#include <cstdio>

namespace pcdn {

namespace {

std::string describe(double delta, double lambda_bar, std::size_t bundle_size,
                     int steps) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "no step accepted after %d halvings (delta=%.3g, "
                "lambda_bar=%.6g, bundle size=%zu)",
                steps, delta, lambda_bar, bundle_size);
  return buf;
}

}  // namespace

LineSearchError::LineSearchError(double delta, double lambda_bar,
                                 std::size_t bundle_size, int steps)
    : NumericError(describe(delta, lambda_bar, bundle_size, steps)),
      delta_(delta),
      lambda_bar_(lambda_bar),
      bundle_size_(bundle_size) {}

}  // namespace pcdn
