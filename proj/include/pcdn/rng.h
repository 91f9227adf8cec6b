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

#ifndef PCDN_RNG_H_
#define PCDN_RNG_H_

#include <cstdint>
#include <random>

namespace pcdn {

// Every random decision is drawn from a stream derived from one master seed,
// so that the number of worker threads never changes which numbers a given
// consumer sees.
enum class Stream : std::uint64_t {
  kPartition = 1,
  kSplit = 2,
  kSynthetic = 3,
  kScdnSlot = 1000,  // + slot index
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                          std::uint64_t index = 0);

inline std::mt19937_64 make_engine(std::uint64_t master, Stream stream,
                                   std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(master, stream, index));
}

}  // namespace pcdn

#endif  // PCDN_RNG_H_
