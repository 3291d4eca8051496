/*
 * Copyright 2026 The picker-bench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PBENCH_CSV_HPP_
#define PBENCH_CSV_HPP_

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pbench {

// Shortest round-trip decimal form; empty for NaN and infinities.
std::string format_double(double v);

// RFC 4180 quoting when the field holds a comma, quote or newline.
std::string csv_escape(std::string_view field);

using CsvField = std::variant<std::string, double, std::int64_t, std::optional<double>>;

// Builds CSV text in memory; missing numbers become empty cells.
class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header);

  void row(std::initializer_list<CsvField> fields);
  const std::string& str() const { return text_; }
  std::size_t rows() const { return rows_; }

 private:
  std::string text_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

}  // namespace pbench

#endif  // PBENCH_CSV_HPP_
