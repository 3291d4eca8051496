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

#include "pbench/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "pbench/error.hpp"

namespace pbench {

std::string format_double(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, end);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

struct FieldFormatter {
  std::string operator()(const std::string& s) const { return csv_escape(s); }
  std::string operator()(double v) const { return format_double(v); }
  std::string operator()(std::int64_t v) const { return std::to_string(v); }
  std::string operator()(const std::optional<double>& v) const {
    return v ? format_double(*v) : std::string();
  }
};

}  // namespace

CsvWriter::CsvWriter(std::initializer_list<std::string_view> header) : columns_(header.size()) {
  bool first = true;
  for (auto h : header) {
    if (!first) text_ += ',';
    text_ += csv_escape(h);
    first = false;
  }
  text_ += '\n';
}

void CsvWriter::row(std::initializer_list<CsvField> fields) {
  if (fields.size() != columns_) throw ValidationError("CsvWriter: row width differs from header");
  bool first = true;
  for (const auto& f : fields) {
    if (!first) text_ += ',';
    text_ += std::visit(FieldFormatter{}, f);
    first = false;
  }
  text_ += '\n';
  ++rows_;
}

}  // namespace pbench
