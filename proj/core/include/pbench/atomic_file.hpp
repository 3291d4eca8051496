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

#ifndef PBENCH_ATOMIC_FILE_HPP_
#define PBENCH_ATOMIC_FILE_HPP_

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace pbench {

// Writes through a sibling temp file and renames it over `path`, so readers
// never observe a partial file. Parent directories are created as needed.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace pbench

#endif  // PBENCH_ATOMIC_FILE_HPP_
