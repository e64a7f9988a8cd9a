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

#include <string>

#include "hefuzz/ckks/engine.hpp"

namespace hefuzz::ckks {

// Ciphertext wire format "CKCT": {magic, version u16, N u32, level u8,
// scale f64, num_moduli u8, compression u8}, then the RNS coefficient arrays
// of c0 and c1, little-endian u64, per modulus. Transport byte accounting is
// defined over exactly this encoding. Compression flag 1 requests zstd, which
// this build rejects (compiled without it); 0 is the default everywhere.
std::string serialize_ciphertext(const Context& ctx, const Ciphertext& ct,
                                 bool compress = false);
Ciphertext deserialize_ciphertext(const Context& ctx, std::string_view bytes);
// Serialized size for the given level, without materializing a ciphertext.
size_t ciphertext_wire_size(const Context& ctx, uint32_t level);

// Key material blobs (magic "CKPK" / "CKRK" / "CKSK").
std::string serialize_public_key(const Context& ctx, const PublicKey& pk);
PublicKey deserialize_public_key(const Context& ctx, std::string_view bytes);
std::string serialize_relin_key(const Context& ctx, const RelinKey& rlk);
RelinKey deserialize_relin_key(const Context& ctx, std::string_view bytes);
std::string serialize_secret_key(const Context& ctx, const SecretKey& sk);
SecretKey deserialize_secret_key(const Context& ctx, std::string_view bytes);

// HE parameter block (text, canonical) for setup exchange.
std::string serialize_params(const HeParams& params);
HeParams deserialize_params(std::string_view bytes);

}  // namespace hefuzz::ckks
