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

#ifndef PBENCH_CLI_RUN_CONFIG_HPP_
#define PBENCH_CLI_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbench/design.hpp"
#include "pbench/error.hpp"
#include "pbench/serialize.hpp"

namespace pbench::cli {

// A declared input that does not exist. field names the config key.
class MissingInputError : public IoError {
 public:
  MissingInputError(std::string field, const std::filesystem::path& path)
      : IoError(field + ": no such file: " + path.string()), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  bool quiet = false;
};

// Parsed JSON run configuration. Relative input paths resolve against
// out_dir, so every subcommand reads what the previous one wrote.
struct RunConfig {
  Json doc;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  bool quiet = false;

  // Object under `key`, or an empty object when absent.
  Json section(std::string_view key) const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;
  // Path under `key` (or `fallback`), resolved; throws MissingInputError
  // when the file does not exist.
  std::filesystem::path input(std::string_view key, std::string_view fallback) const;
  bool has_input(std::string_view key, std::string_view fallback) const;
  DesignSpec design() const;
  std::uint64_t seed_for(std::string_view stage) const;
};

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides);
RunConfig parse_config(const Json& doc, const Overrides& overrides);

}  // namespace pbench::cli

#endif  // PBENCH_CLI_RUN_CONFIG_HPP_
