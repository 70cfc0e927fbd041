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

#include "embmorph/cli/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <memory>

#include "embmorph/dataset_io.hpp"
#include "embmorph/error.hpp"

namespace embmorph::cli {

namespace {

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

RunManifest::RunManifest(std::string command_name)
    : command(std::move(command_name)), tool_version(EMBMORPH_VERSION) {}

void RunManifest::add_input(const std::filesystem::path& path, std::string_view bytes) {
  inputs.push_back({path.string(), bytes.size(), sha256_hex(bytes)});
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["tool_version"] = tool_version;
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  j["config"] = config;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const InputDigest& in : inputs) {
    j["inputs"].push_back({{"path", in.path}, {"bytes", in.bytes}, {"sha256", in.sha256}});
  }
  j["outputs"] = outputs;
  j["timings_seconds"] = nlohmann::ordered_json::object();
  for (const auto& [phase, seconds] : timings) j["timings_seconds"][phase] = seconds;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& destination) const {
  write_file_atomic(destination, to_json());
}

PhaseTimer::PhaseTimer(RunManifest& manifest) : manifest_(manifest), start_ns_(now_ns()) {}

void PhaseTimer::lap(std::string phase) {
  const std::int64_t t = now_ns();
  manifest_.timings.emplace_back(std::move(phase), static_cast<double>(t - start_ns_) * 1e-9);
  start_ns_ = t;
}

}  // namespace embmorph::cli
