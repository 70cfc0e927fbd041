// Copyright 2026 The embmorph Authors.
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace embmorph {

enum class ErrorCode {
  // embedding arithmetic
  ZeroVector,
  DimensionTooSmall,
  DimensionMismatch,
  AntipodalSources,
  AlphaOutOfRange,
  EmptyList,
  // persistence
  BadMagic,
  UnsupportedVersion,
  BadHeader,
  CorruptRecord,
  TruncatedFile,
  TrailingData,
  DuplicateKey,
  MissingProbes,
  SelfMorph,
  DuplicatePair,
  ParseError,
  IoError,
  // simulation
  InvalidRho,
  InvalidDims,
  InvalidConfig,
  // metrics
  EmptyScores,
  InvalidTarget,
  MissingEmbedding,
  EmptyBlocks,
  InvalidArgument,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// CLI prints `error_name(code())` so scripts can match on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace embmorph
