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

#ifndef PBENCH_TRACE_IO_HPP_
#define PBENCH_TRACE_IO_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace pbench {

enum class Component : std::size_t { Z = 0, N = 1, E = 2 };

// Raw 3-component samples, component order Z, N, E.
struct Trace3C {
  std::array<std::vector<float>, 3> components;

  Trace3C() = default;
  explicit Trace3C(std::size_t n_samples);

  std::size_t n_samples() const { return components[0].size(); }
  std::span<const float> component(Component c) const {
    return components[static_cast<std::size_t>(c)];
  }
  std::span<float> component(Component c) { return components[static_cast<std::size_t>(c)]; }

  bool operator==(const Trace3C&) const = default;
};

// PBT1 container: 4 magic bytes, u32 LE n_samples, then 3*n LE float32,
// component-major. Decoding is bit-exact (NaN payloads included).
std::vector<std::byte> encode_trace(const Trace3C& trace);
Trace3C decode_trace(std::span<const std::byte> bytes);

Trace3C load_trace(const std::filesystem::path& path);
// Also checks the header length against the metadata's n_samples.
Trace3C load_trace(const std::filesystem::path& path, std::int64_t expected_samples);
void save_trace(const std::filesystem::path& path, const Trace3C& trace);

}  // namespace pbench

#endif  // PBENCH_TRACE_IO_HPP_
