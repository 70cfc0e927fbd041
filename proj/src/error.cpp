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

#include "embmorph/error.hpp"

namespace embmorph {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AntipodalSources: return "AntipodalSources";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::MissingProbes: return "MissingProbes";
    case ErrorCode::SelfMorph: return "SelfMorph";
    case ErrorCode::DuplicatePair: return "DuplicatePair";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidRho: return "InvalidRho";
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::MissingEmbedding: return "MissingEmbedding";
    case ErrorCode::EmptyBlocks: return "EmptyBlocks";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

}  // namespace embmorph
