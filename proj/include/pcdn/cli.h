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

#ifndef PCDN_CLI_H_
#define PCDN_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace pcdn {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;     // bad flags, I/O or parse errors
inline constexpr int kExitBudget = 2;    // iteration budget exhausted
inline constexpr int kExitNumeric = 3;   // divergence, line-search failure

// Runs the command line `args` (args[0] is the program name). Everything
// is written to `out` and `err`; nothing touches std::cout directly.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace pcdn

#endif  // PCDN_CLI_H_
