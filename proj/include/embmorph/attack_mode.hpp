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

#include <optional>
#include <string_view>

namespace embmorph {

/// White-box: the attack is evaluated on the FRS it was crafted with.
enum class AttackMode { WhiteBox, BlackBox };

inline std::string_view mode_name(AttackMode mode) noexcept {
  return mode == AttackMode::WhiteBox ? "white-box" : "black-box";
}

inline std::optional<AttackMode> parse_mode(std::string_view text) noexcept {
  if (text == "white-box") return AttackMode::WhiteBox;
  if (text == "black-box") return AttackMode::BlackBox;
  return std::nullopt;
}

}  // namespace embmorph
