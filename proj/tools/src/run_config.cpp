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

#include "pbench_cli/run_config.hpp"

#include "pbench/atomic_file.hpp"
#include "pbench/rng.hpp"

namespace pbench::cli {

namespace fs = std::filesystem;

Json RunConfig::section(std::string_view key) const {
  const auto it = doc.find(std::string(key));
  if (it == doc.end() || it->is_null()) return Json::object();
  if (!it->is_object()) throw FieldError(std::string(key), "expected an object");
  return *it;
}

fs::path RunConfig::resolve(const fs::path& p) const { return p.is_absolute() ? p : out_dir / p; }

bool RunConfig::has_input(std::string_view key, std::string_view fallback) const {
  return fs::exists(resolve(get_field_or<std::string>(doc, key, "", std::string(fallback))));
}

fs::path RunConfig::input(std::string_view key, std::string_view fallback) const {
  const fs::path p = resolve(get_field_or<std::string>(doc, key, "", std::string(fallback)));
  if (!fs::exists(p)) throw MissingInputError(std::string(key), p);
  return p;
}

DesignSpec RunConfig::design() const {
  if (!doc.contains("design")) return DesignSpec{};
  return parse_design(doc.at("design"), "design");
}

std::uint64_t RunConfig::seed_for(std::string_view stage) const { return derive_seed(seed, stage); }

RunConfig parse_config(const Json& doc, const Overrides& overrides) {
  if (!doc.is_object()) throw FieldError("<root>", "configuration must be a JSON object");
  RunConfig c;
  c.doc = doc;
  c.seed = overrides.seed ? *overrides.seed : get_field<std::uint64_t>(doc, "seed", "");
  c.out_dir = overrides.out_dir ? *overrides.out_dir
                                : fs::path(get_field_or<std::string>(doc, "out_dir", "", "out"));
  c.quiet = overrides.quiet;
  return c;
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
  if (!fs::exists(path)) throw MissingInputError("config", path);
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc, overrides);
}

}  // namespace pbench::cli
