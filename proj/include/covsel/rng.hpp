/*
 *  Copyright 2026 The covsel Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace covsel {

using Rng = std::mt19937_64;

// Counter-based seed derivation: the same (root, counters...) always yields
// the same stream regardless of how work is scheduled.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> counters);

[[nodiscard]] inline Rng make_rng(std::uint64_t root, std::initializer_list<std::uint64_t> counters) {
    return Rng(derive_seed(root, counters));
}

}  // namespace covsel
