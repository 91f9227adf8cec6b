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

#ifndef PCDN_ERROR_H_
#define PCDN_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcdn {

// Malformed input text (LIBSVM data, model files, CSV).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Invalid configuration or argument outside its documented range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite intermediate value (overflowing exp, NaN objective, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Armijo backtracking exhausted its step budget.
class LineSearchError : public NumericError {
 public:
  LineSearchError(double delta, double lambda_bar, std::size_t bundle_size,
                  int steps);
  double delta() const { return delta_; }
  double lambda_bar() const { return lambda_bar_; }
  std::size_t bundle_size() const { return bundle_size_; }

 private:
  double delta_;
  double lambda_bar_;
  std::size_t bundle_size_;
};

// Objective blew up (non-finite, or above the divergence threshold).
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, double objective)
      : NumericError(what), objective_(objective) {}
  double objective() const { return objective_; }

 private:
  double objective_;
};

}  // namespace pcdn

#endif  // PCDN_ERROR_H_
