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

#include "pcdn/model_io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "pcdn/error.h"

namespace pcdn {

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_real(const std::string& text, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw ParseError(line, "bad number '" + text + "'");
  }
  return v;
}

std::size_t to_count(std::string_view text, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "bad integer '" + std::string(text) + "'");
  }
  return v;
}

// Value of `key=value` at the expected position of the header.
std::string header_field(std::istringstream& in, const std::string& key) {
  std::string token;
  if (!(in >> token) || token.rfind(key + "=", 0) != 0) {
    throw ParseError(1, "model header is missing '" + key + "='");
  }
  return token.substr(key.size() + 1);
}

}  // namespace

void write_model(std::ostream& out, const Model& model) {
  std::size_t nnz = 0;
  for (double v : model.w) nnz += v != 0.0;
  out << "pcdn-model n=" << model.w.size() << " loss=" << to_string(model.loss)
      << " c=" << g17(model.c) << " nnz=" << nnz << '\n';
  for (std::size_t j = 0; j < model.w.size(); ++j) {
    if (model.w[j] != 0.0) out << (j + 1) << ':' << g17(model.w[j]) << '\n';
  }
  out << "end\n";
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_model(out, model);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Model read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty model file");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "pcdn-model") throw ParseError(1, "not a pcdn model file");
  Model model;
  const auto n = to_count(header_field(header, "n"), 1);
  try {
    model.loss = parse_loss_kind(header_field(header, "loss"));
  } catch (const ConfigError& e) {
    throw ParseError(1, e.what());
  }
  model.c = to_real(header_field(header, "c"), 1);
  const auto nnz = to_count(header_field(header, "nnz"), 1);
  if (nnz > n) throw ParseError(1, "nnz exceeds n");
  model.w.assign(n, 0.0);

  std::size_t previous = 0;
  for (std::size_t k = 0; k < nnz; ++k) {
    const auto line_no = k + 2;
    if (!std::getline(in, line)) {
      throw ParseError(line_no, "model truncated: expected " +
                                    std::to_string(nnz) + " weights");
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ParseError(line_no, "expected index:weight");
    }
    const auto index = to_count(std::string_view(line).substr(0, colon), line_no);
    if (index < 1 || index > n || index <= previous) {
      throw ParseError(line_no, "index out of range or not increasing");
    }
    previous = index;
    model.w[index - 1] = to_real(line.substr(colon + 1), line_no);
  }
  if (!std::getline(in, line) || line != "end") {
    throw ParseError(nnz + 2, "model truncated: missing end marker");
  }
  return model;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_model(in);
}

}  // namespace pcdn
