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

#ifndef PBENCH_RNG_HPP_
#define PBENCH_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace pbench {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Independent stream seed for a (base, parts...) tuple, e.g. (seed, a, d).
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> parts) noexcept;

// Stream seed keyed by a string id (per-waveform generation).
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) noexcept;

// k distinct indices from [0, n), uniform, in draw order. Requires k <= n.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng);

// Draws from a standard normal using the given engine.
double standard_normal(Rng& rng);

double uniform01(Rng& rng);

}  // namespace pbench

#endif  // PBENCH_RNG_HPP_
