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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace embmorph::cli {

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

struct InputDigest {
  std::string path;
  std::uint64_t bytes;
  std::string sha256;
};

/// Reproducibility record written next to every command output.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<InputDigest> inputs;
  std::optional<std::uint64_t> seed;
  std::string tool_version;
  std::vector<std::pair<std::string, double>> timings;  // seconds per phase
  std::vector<std::string> outputs;

  explicit RunManifest(std::string command_name);

  /// Records the digest of exactly the bytes that were read.
  void add_input(const std::filesystem::path& path, std::string_view bytes);

  std::string to_json() const;
  void write(const std::filesystem::path& destination) const;
};

/// Wall-clock phase timer feeding RunManifest::timings.
class PhaseTimer {
 public:
  explicit PhaseTimer(RunManifest& manifest);
  void lap(std::string phase);

 private:
  RunManifest& manifest_;
  std::int64_t start_ns_;
};

}  // namespace embmorph::cli
