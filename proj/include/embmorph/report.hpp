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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace embmorph {

enum class ReportFormat { Csv, Markdown };

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept;

/// A rendered-as-is table of strings. Notes are emitted below a non-empty
/// Markdown table only; an empty table renders as its header alone.
struct ReportTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;
};

/// Fraction in [0, 1] as a percentage with exactly two decimals ("89.88").
std::string format_percent(double fraction);

/// Fixed-point with the given number of decimals.
std::string format_fixed(double value, int decimals);

std::string render_report(const ReportTable& table, ReportFormat format);
void write_report(const ReportTable& table, ReportFormat format, const std::filesystem::path& destination);

}  // namespace embmorph
