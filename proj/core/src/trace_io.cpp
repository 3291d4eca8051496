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

#include "pbench/trace_io.hpp"

#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include "pbench/atomic_file.hpp"
#include "pbench/error.hpp"

namespace pbench {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'B', 'T', '1'};
constexpr std::size_t kHeaderBytes = 8;

void put_u32(std::byte* out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out[b] = static_cast<std::byte>((v >> (8 * b)) & 0xffu);
}

std::uint32_t get_u32(const std::byte* in) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= std::to_integer<std::uint32_t>(in[b]) << (8 * b);
  return v;
}

}  // namespace

Trace3C::Trace3C(std::size_t n_samples) {
  for (auto& c : components) c.assign(n_samples, 0.0f);
}

std::vector<std::byte> encode_trace(const Trace3C& trace) {
  const std::size_t n = trace.n_samples();
  for (const auto& c : trace.components)
    if (c.size() != n) throw ValidationError("trace components differ in length");
  if (n > std::numeric_limits<std::uint32_t>::max())
    throw ValidationError("trace too long for PBT1 container");
  std::vector<std::byte> out(kHeaderBytes + 3 * n * 4);
  std::memcpy(out.data(), kMagic.data(), kMagic.size());
  put_u32(out.data() + 4, static_cast<std::uint32_t>(n));
  std::byte* p = out.data() + kHeaderBytes;
  for (const auto& c : trace.components) {
    for (float f : c) {
      put_u32(p, std::bit_cast<std::uint32_t>(f));
      p += 4;
    }
  }
  return out;
}

Trace3C decode_trace(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("trace file shorter than header");
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
    throw FormatError("bad magic bytes (expected PBT1)");
  const std::size_t n = get_u32(bytes.data() + 4);
  const std::size_t payload = bytes.size() - kHeaderBytes;
  if (payload != 3 * n * 4)
    throw FormatError("trace length mismatch: header n_samples=" + std::to_string(n) +
                      " needs " + std::to_string(3 * n * 4) + " payload bytes, found " +
                      std::to_string(payload));
  Trace3C trace(n);
  const std::byte* p = bytes.data() + kHeaderBytes;
  for (auto& c : trace.components) {
    for (float& f : c) {
      f = std::bit_cast<float>(get_u32(p));
      p += 4;
    }
  }
  return trace;
}

Trace3C load_trace(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  try {
    return decode_trace(std::as_bytes(std::span(raw.data(), raw.size())));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Trace3C load_trace(const std::filesystem::path& path, std::int64_t expected_samples) {
  Trace3C trace = load_trace(path);
  if (static_cast<std::int64_t>(trace.n_samples()) != expected_samples)
    throw FormatError(path.string() + ": trace has " + std::to_string(trace.n_samples()) +
                      " samples, metadata declares " + std::to_string(expected_samples));
  return trace;
}

void save_trace(const std::filesystem::path& path, const Trace3C& trace) {
  const auto bytes = encode_trace(trace);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                           bytes.size()));
}

}  // namespace pbench
