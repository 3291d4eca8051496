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

#ifndef PBENCH_CLI_CLI_HPP_
#define PBENCH_CLI_CLI_HPP_

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pbench_cli/run_config.hpp"

namespace pbench::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitInput = 4;
inline constexpr int kExitData = 5;

const std::vector<std::string>& subcommands();

// Runs one subcommand and returns the written files, relative to out_dir.
std::vector<std::string> run_command(std::string_view name, const RunConfig& config);

// Full command line (args[0] is the program name). Errors go to `err` as one
// JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pbench::cli

#endif  // PBENCH_CLI_CLI_HPP_
