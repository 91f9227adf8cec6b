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

#ifndef PCDN_SPARSE_DATA_H_
#define PCDN_SPARSE_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcdn {

// Nonzeros of one feature column, in increasing sample order.
struct ColumnView {
  std::span<const std::uint32_t> rows;
  std::span<const double> values;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

// Feature-major (CSC) storage of the s x n design matrix. Each worker of the
// solver reads whole columns, never rows. Immutable after construction.
class SparseDesignMatrix {
 public:
  SparseDesignMatrix() : col_offsets_(1, 0) {}

  // Validates every structural invariant; throws ConfigError on violation.
  SparseDesignMatrix(std::size_t n_samples, std::size_t n_features,
                     std::vector<std::size_t> col_offsets,
                     std::vector<std::uint32_t> row_indices,
                     std::vector<double> values);

  std::size_t n_samples() const { return n_samples_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t nnz() const { return values_.size(); }

  // Throws std::out_of_range for j >= n_features().
  ColumnView column(std::size_t j) const;

  ColumnView column_unchecked(std::size_t j) const noexcept {
    const auto begin = col_offsets_[j];
    const auto count = col_offsets_[j + 1] - begin;
    return {std::span(row_indices_).subspan(begin, count),
            std::span(values_).subspan(begin, count)};
  }

  std::span<const std::size_t> col_offsets() const { return col_offsets_; }
  std::span<const std::uint32_t> row_indices() const { return row_indices_; }
  std::span<const double> values() const { return values_; }

  // Same matrix with extra empty columns appended (n may only grow).
  SparseDesignMatrix widened(std::size_t n_features) const;

  bool operator==(const SparseDesignMatrix&) const = default;

 private:
  std::size_t n_samples_ = 0;
  std::size_t n_features_ = 0;
  std::vector<std::size_t> col_offsets_;
  std::vector<std::uint32_t> row_indices_;
  std::vector<double> values_;
};

struct Dataset {
  SparseDesignMatrix matrix;
  std::vector<std::int8_t> labels;  // each exactly -1 or +1

  std::size_t n_samples() const { return matrix.n_samples(); }
  std::size_t n_features() const { return matrix.n_features(); }
  bool operator==(const Dataset&) const = default;
};

// lambda[j] = sum_i x_ij^2, summed in column order.
struct ColumnSquaredNorms {
  std::vector<double> lambda;
};

ColumnSquaredNorms column_squared_norms(const SparseDesignMatrix& matrix);

struct ParseOptions {
  // Feature count; may only exceed the largest index in the data.
  std::optional<std::size_t> n_features;
  // Receives non-fatal diagnostics (label 0 mapped to -1, ...).
  std::function<void(const std::string&)> warn;
};

// Reads `<label> <idx>:<val> ...` lines with 1-based, strictly increasing
// indices. Labels > 0 become +1, all others -1. Throws ParseError naming the
// offending line.
Dataset parse_libsvm(std::istream& in, const ParseOptions& options = {});
Dataset parse_libsvm(std::string_view text, const ParseOptions& options = {});

// Loads a file; names ending in ".gz" are decompressed on the fly.
Dataset load_libsvm(const std::filesystem::path& path,
                    const ParseOptions& options = {});

// Lossless inverse of parse_libsvm (17 significant digits).
void write_libsvm(std::ostream& out, const Dataset& data);

// Samples selected by `rows`, in that order; feature count preserved.
Dataset select_samples(const Dataset& data, std::span<const std::size_t> rows);

struct DataSplit {
  Dataset train;
  Dataset test;
};

// Seeded random partition of samples; round(test_fraction * s) go to test.
// Throws ConfigError if the fraction is outside (0, 1) or a side is empty.
DataSplit train_test_split(const Dataset& data, double test_fraction,
                           std::uint64_t seed);

// Scales every sample to unit Euclidean norm (all-zero rows untouched).
Dataset normalize_samples(const Dataset& data);

}  // namespace pcdn

#endif  // PCDN_SPARSE_DATA_H_
