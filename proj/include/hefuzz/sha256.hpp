// Copyright 2025-present the hefuzz authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace hefuzz {

// Self-contained SHA-256 (FIPS 180-4). Used for shingle digests and parameter
// fingerprints; both parties must agree bit-for-bit, so no dependency on a
// system crypto library.
std::array<uint8_t, 32> sha256(const void* data, size_t len);

inline std::array<uint8_t, 32> sha256(std::string_view s) {
  return sha256(s.data(), s.size());
}

// First 8 digest bytes interpreted little-endian.
uint64_t sha256_prefix64(std::string_view s);

// First 4 digest bytes interpreted little-endian.
uint32_t sha256_prefix32(std::string_view s);

}  // namespace hefuzz
