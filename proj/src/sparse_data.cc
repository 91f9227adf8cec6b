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

#include "pcdn/sparse_data.h"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pcdn/error.h"
#include "pcdn/rng.h"

namespace pcdn {

SparseDesignMatrix::SparseDesignMatrix(std::size_t n_samples,
                                       std::size_t n_features,
                                       std::vector<std::size_t> col_offsets,
                                       std::vector<std::uint32_t> row_indices,
                                       std::vector<double> values)
    : n_samples_(n_samples),
      n_features_(n_features),
      col_offsets_(std::move(col_offsets)),
      row_indices_(std::move(row_indices)),
      values_(std::move(values)) {
  if (col_offsets_.size() != n_features_ + 1 || col_offsets_.front() != 0 ||
      col_offsets_.back() != values_.size() ||
      row_indices_.size() != values_.size()) {
    throw ConfigError("column offsets do not describe the nonzero arrays");
  }
  if (n_samples_ > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("too many samples for 32-bit row indices");
  }
  for (std::size_t j = 0; j < n_features_; ++j) {
    const auto begin = col_offsets_[j];
    const auto end = col_offsets_[j + 1];
    if (end < begin) throw ConfigError("column offsets must be nondecreasing");
    for (auto k = begin; k < end; ++k) {
      if (row_indices_[k] >= n_samples_) {
        throw ConfigError("row index out of range in column " +
                          std::to_string(j));
      }
      if (k > begin && row_indices_[k] <= row_indices_[k - 1]) {
        throw ConfigError("row indices must increase within column " +
                          std::to_string(j));
      }
      if (!std::isfinite(values_[k])) {
        throw ConfigError("non-finite value in column " + std::to_string(j));
      }
    }
  }
}

ColumnView SparseDesignMatrix::column(std::size_t j) const {
  if (j >= n_features_) {
    throw std::out_of_range("feature index " + std::to_string(j) +
                            " out of range [0, " +
                            std::to_string(n_features_) + ")");
  }
  return column_unchecked(j);
}

SparseDesignMatrix SparseDesignMatrix::widened(std::size_t n_features) const {
  if (n_features < n_features_) {
    throw ConfigError("feature count may only grow: " +
                      std::to_string(n_features) + " < " +
                      std::to_string(n_features_));
  }
  auto offsets = col_offsets_;
  offsets.resize(n_features + 1, values_.size());
  return SparseDesignMatrix(n_samples_, n_features, std::move(offsets),
                            row_indices_, values_);
}

ColumnSquaredNorms column_squared_norms(const SparseDesignMatrix& matrix) {
  ColumnSquaredNorms norms;
  norms.lambda.resize(matrix.n_features());
  for (std::size_t j = 0; j < matrix.n_features(); ++j) {
    double sum = 0.0;
    for (double v : matrix.column_unchecked(j).values) sum += v * v;
    norms.lambda[j] = sum;
  }
  return norms;
}

namespace {

struct Triplet {
  std::uint32_t row;
  std::uint32_t col;
  double value;
};

// Builds CSC storage from triplets listed in row-major order.
SparseDesignMatrix assemble(std::size_t n_samples, std::size_t n_features,
                            const std::vector<Triplet>& triplets) {
  std::vector<std::size_t> offsets(n_features + 1, 0);
  for (const auto& t : triplets) ++offsets[t.col + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<std::uint32_t> rows(triplets.size());
  std::vector<double> values(triplets.size());
  for (const auto& t : triplets) {
    const auto k = cursor[t.col]++;
    rows[k] = t.row;
    values[k] = t.value;
  }
  return SparseDesignMatrix(n_samples, n_features, std::move(offsets),
                            std::move(rows), std::move(values));
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

double parse_double(std::string_view token, std::size_t line,
                    const char* what) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects '+'
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError(line, std::string("non-numeric ") + what + " '" +
                               std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line, std::string("non-finite ") + what + " '" +
                               std::string(token) + "'");
  }
  return value;
}

class LibsvmParser {
 public:
  explicit LibsvmParser(const ParseOptions& options) : options_(options) {}

  void feed_line(std::string_view text) {
    ++line_;
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
      while (pos < text.size() && is_space(text[pos])) ++pos;
      const auto start = pos;
      while (pos < text.size() && !is_space(text[pos])) ++pos;
      return text.substr(start, pos - start);
    };

    const auto label_token = next_token();
    if (label_token.empty()) return;  // blank line
    const double label = parse_double(label_token, line_, "label");
    if (label == 0.0 && options_.warn) {
      options_.warn("line " + std::to_string(line_) +
                    ": label 0 mapped to -1");
    }
    labels_.push_back(label > 0.0 ? 1 : -1);
    const auto row = static_cast<std::uint32_t>(labels_.size() - 1);

    std::size_t previous = 0;
    for (auto token = next_token(); !token.empty(); token = next_token()) {
      const auto colon = token.find(':');
      if (colon == std::string_view::npos || colon == 0 ||
          colon + 1 == token.size()) {
        throw ParseError(line_,
                         "malformed feature '" + std::string(token) + "'");
      }
      const auto index_text = token.substr(0, colon);
      long long index = 0;
      const auto [ptr, ec] = std::from_chars(
          index_text.data(), index_text.data() + index_text.size(), index);
      if (ec != std::errc() || ptr != index_text.data() + index_text.size()) {
        throw ParseError(line_, "malformed feature index '" +
                                    std::string(index_text) + "'");
      }
      if (index < 1) {
        throw ParseError(line_, "feature index must be >= 1, got " +
                                    std::to_string(index));
      }
      const auto idx = static_cast<std::size_t>(index);
      if (idx == previous) {
        throw ParseError(line_,
                         "duplicate feature index " + std::to_string(idx));
      }
      if (idx < previous) {
        throw ParseError(line_, "feature indices must increase, got " +
                                    std::to_string(idx) + " after " +
                                    std::to_string(previous));
      }
      if (idx > std::numeric_limits<std::uint32_t>::max()) {
        throw ParseError(line_, "feature index too large");
      }
      previous = idx;
      const double value =
          parse_double(token.substr(colon + 1), line_, "feature value");
      max_index_ = std::max(max_index_, idx);
      if (value != 0.0) {
        triplets_.push_back({row, static_cast<std::uint32_t>(idx - 1), value});
      }
    }
  }

  Dataset finish() {
    std::size_t n = max_index_;
    if (options_.n_features) {
      if (*options_.n_features < max_index_) {
        throw ConfigError("data references feature " +
                          std::to_string(max_index_) +
                          " beyond the requested feature count " +
                          std::to_string(*options_.n_features));
      }
      n = *options_.n_features;
    }
    Dataset data;
    data.matrix = assemble(labels_.size(), n, triplets_);
    data.labels = std::move(labels_);
    return data;
  }

 private:
  const ParseOptions& options_;
  std::size_t line_ = 0;
  std::size_t max_index_ = 0;
  std::vector<std::int8_t> labels_;
  std::vector<Triplet> triplets_;
};

std::string read_gzip(const std::filesystem::path& path) {
  std::unique_ptr<gzFile_s, int (*)(gzFile)> file(
      gzopen(path.c_str(), "rb"), &gzclose);
  if (!file) throw std::runtime_error("cannot open " + path.string());
  std::string text;
  char buffer[1 << 16];
  for (;;) {
    const int got = gzread(file.get(), buffer, sizeof(buffer));
    if (got < 0) {
      int err = 0;
      throw std::runtime_error("gzip read error in " + path.string() + ": " +
                               gzerror(file.get(), &err));
    }
    if (got == 0) break;
    text.append(buffer, static_cast<std::size_t>(got));
  }
  return text;
}

}  // namespace

Dataset parse_libsvm(std::string_view text, const ParseOptions& options) {
  LibsvmParser parser(options);
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    parser.feed_line(text.substr(start, end - start));
    start = end + 1;
  }
  return parser.finish();
}

Dataset parse_libsvm(std::istream& in, const ParseOptions& options) {
  LibsvmParser parser(options);
  std::string line;
  while (std::getline(in, line)) parser.feed_line(line);
  if (in.bad()) throw std::runtime_error("read error while parsing data");
  return parser.finish();
}

Dataset load_libsvm(const std::filesystem::path& path,
                    const ParseOptions& options) {
  if (path.extension() == ".gz") {
    return parse_libsvm(std::string_view(read_gzip(path)), options);
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_libsvm(in, options);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  const auto& m = data.matrix;
  // Transpose back to row order.
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(
      m.n_samples());
  for (std::size_t j = 0; j < m.n_features(); ++j) {
    const auto col = m.column_unchecked(j);
    for (std::size_t k = 0; k < col.size(); ++k) {
      rows[col.rows[k]].emplace_back(j + 1, col.values[k]);
    }
  }
  char buffer[64];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << (data.labels[i] > 0 ? "+1" : "-1");
    for (const auto& [index, value] : rows[i]) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", value);
      out << ' ' << index << ':' << buffer;
    }
    out << '\n';
  }
}

Dataset select_samples(const Dataset& data,
                       std::span<const std::size_t> rows) {
  const auto& m = data.matrix;
  std::vector<std::int64_t> new_index(m.n_samples(), -1);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= m.n_samples()) {
      throw std::out_of_range("sample index out of range");
    }
    if (new_index[rows[k]] >= 0) throw ConfigError("duplicate sample index");
    new_index[rows[k]] = static_cast<std::int64_t>(k);
  }
  std::vector<std::size_t> offsets(m.n_features() + 1, 0);
  std::vector<std::uint32_t> out_rows;
  std::vector<double> out_values;
  std::vector<std::pair<std::uint32_t, double>> scratch;
  for (std::size_t j = 0; j < m.n_features(); ++j) {
    const auto col = m.column_unchecked(j);
    scratch.clear();
    for (std::size_t k = 0; k < col.size(); ++k) {
      const auto mapped = new_index[col.rows[k]];
      if (mapped >= 0) {
        scratch.emplace_back(static_cast<std::uint32_t>(mapped),
                             col.values[k]);
      }
    }
    std::sort(scratch.begin(), scratch.end());
    for (const auto& [r, v] : scratch) {
      out_rows.push_back(r);
      out_values.push_back(v);
    }
    offsets[j + 1] = out_values.size();
  }
  Dataset out;
  out.matrix = SparseDesignMatrix(rows.size(), m.n_features(),
                                  std::move(offsets), std::move(out_rows),
                                  std::move(out_values));
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(data.labels[r]);
  return out;
}

DataSplit train_test_split(const Dataset& data, double test_fraction,
                           std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must be in (0, 1)");
  }
  const auto s = data.n_samples();
  const auto n_test =
      static_cast<std::size_t>(std::llround(test_fraction * double(s)));
  if (n_test == 0 || n_test >= s) {
    throw ConfigError("split would leave an empty train or test set");
  }
  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), 0);
  auto engine = make_engine(seed, Stream::kSplit);
  std::shuffle(order.begin(), order.end(), engine);
  std::vector<std::size_t> test(order.begin(), order.begin() + n_test);
  std::vector<std::size_t> train(order.begin() + n_test, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {select_samples(data, train), select_samples(data, test)};
}

Dataset normalize_samples(const Dataset& data) {
  const auto& m = data.matrix;
  std::vector<double> row_norm(m.n_samples(), 0.0);
  const auto rows = m.row_indices();
  const auto values = m.values();
  for (std::size_t k = 0; k < values.size(); ++k) {
    row_norm[rows[k]] += values[k] * values[k];
  }
  for (auto& v : row_norm) v = std::sqrt(v);
  std::vector<double> scaled(values.begin(), values.end());
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    scaled[k] /= row_norm[rows[k]];
  }
  Dataset out;
  out.matrix = SparseDesignMatrix(
      m.n_samples(), m.n_features(),
      std::vector<std::size_t>(m.col_offsets().begin(), m.col_offsets().end()),
      std::vector<std::uint32_t>(rows.begin(), rows.end()), std::move(scaled));
  out.labels = data.labels;
  return out;
}

}  // namespace pcdn
