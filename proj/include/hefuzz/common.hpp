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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hefuzz {

// Base of the error hierarchy. Every named error condition gets its own
// type so callers and tests can catch them precisely.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// encoding
struct NameTooShort : Error {
  using Error::Error;
};
struct ZeroVector : Error {
  using Error::Error;
};
struct EmptyDataset : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};

// clustering
struct TooFewPoints : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};

// ckks
struct InvalidParams : Error {
  using Error::Error;
};
struct TooManySlots : Error {
  using Error::Error;
};
struct LevelExhausted : Error {
  using Error::Error;
};
struct LevelMismatch : Error {
  using Error::Error;
};
struct ScaleMismatch : Error {
  using Error::Error;
};
struct ScaleOverflow : Error {
  using Error::Error;
};

// protocol / transport
struct BatchTooLarge : Error {
  using Error::Error;
};
struct ModelMissing : Error {
  using Error::Error;
};
struct TransportFailure : Error {
  using Error::Error;
};
struct FrameCorrupt : Error {
  using Error::Error;
};
struct ProtocolPhaseViolation : Error {
  using Error::Error;
};
struct BindFailure : Error {
  using Error::Error;
};

// cli / io
struct IoError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct PoolExhausted : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};

}  // namespace hefuzz
